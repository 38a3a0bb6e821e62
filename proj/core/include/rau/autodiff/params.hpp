#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rau/autodiff/tape.hpp"
#include "rau/matrix.hpp"

namespace rau::ad {

struct NamedTensor {
  std::string name;
  Matrix value;

  friend bool operator==(const NamedTensor&, const NamedTensor&) = default;
};

/// Ordered collection of named trainable tensors.
class ParamSet {
 public:
  /// Returns the index of the new entry. Names must be unique.
  std::size_t add(std::string name, Matrix value);

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t scalar_count() const noexcept;

  NamedTensor& operator[](std::size_t i) { return entries_.at(i); }
  const NamedTensor& operator[](std::size_t i) const { return entries_.at(i); }

  std::optional<std::size_t> find(std::string_view name) const noexcept;
  const Matrix& get(std::string_view name) const;

  auto begin() noexcept { return entries_.begin(); }
  auto end() noexcept { return entries_.end(); }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  /// Registers every entry on the tape as a gradient-receiving leaf.
  std::vector<Var> bind(Tape& tape) const;
  /// Registers every entry as a constant.
  std::vector<Var> bind_constant(Tape& tape) const;

  friend bool operator==(const ParamSet&, const ParamSet&) = default;

 private:
  std::vector<NamedTensor> entries_;
};

/// Gradients of bound parameters after a backward sweep; zero where nothing flowed.
std::vector<Matrix> collect_grads(const ParamSet& params, const std::vector<Var>& bound);

}  // namespace rau::ad
