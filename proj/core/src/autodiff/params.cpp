#include "rau/autodiff/params.hpp"

#include "rau/error.hpp"

namespace rau::ad {

std::size_t ParamSet::add(std::string name, Matrix value) {
  if (find(name)) throw ValidationError("ParamSet: duplicate parameter '" + name + "'");
  if (!value.all_finite()) throw ValidationError("ParamSet: non-finite values in '" + name + "'");
  entries_.push_back({std::move(name), std::move(value)});
  return entries_.size() - 1;
}

std::size_t ParamSet::scalar_count() const noexcept {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.value.size();
  return n;
}

std::optional<std::size_t> ParamSet::find(std::string_view name) const noexcept {
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (entries_[i].name == name) return i;
  return std::nullopt;
}

const Matrix& ParamSet::get(std::string_view name) const {
  auto i = find(name);
  if (!i) throw ValidationError("ParamSet: no parameter named '" + std::string(name) + "'");
  return entries_[*i].value;
}

std::vector<Var> ParamSet::bind(Tape& tape) const {
  std::vector<Var> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(tape.variable(e.value));
  return out;
}

std::vector<Var> ParamSet::bind_constant(Tape& tape) const {
  std::vector<Var> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(tape.constant(e.value));
  return out;
}

std::vector<Matrix> collect_grads(const ParamSet& params, const std::vector<Var>& bound) {
  if (bound.size() != params.size()) throw ShapeError("collect_grads: binding/parameter count mismatch");
  std::vector<Matrix> grads;
  grads.reserve(bound.size());
  for (std::size_t i = 0; i < bound.size(); ++i) {
    const Matrix& g = bound[i].grad();
    grads.push_back(g.empty() ? Matrix(params[i].value.rows(), params[i].value.cols()) : g);
  }
  return grads;
}

}  // namespace rau::ad
