#include "rau/autodiff/optim.hpp"

#include <cmath>
#include <string>

#include "rau/error.hpp"
#include "rau/random.hpp"

namespace rau::ad {

Matrix xavier_uniform(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  if (rows == 0 || cols == 0) throw ShapeError("xavier_uniform: dimensions must be >= 1");
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  SplitMix64 rng(seed);
  Matrix w(rows, cols);
  for (double& v : w.values()) v = rng.uniform(-bound, bound);
  return w;
}

AdamState AdamState::for_params(const ParamSet& params, AdamOptions options) {
  AdamState s;
  s.options = options;
  for (const auto& p : params) {
    s.m.emplace_back(p.value.rows(), p.value.cols());
    s.v.emplace_back(p.value.rows(), p.value.cols());
  }
  return s;
}

void adam_step(ParamSet& params, std::span<const Matrix> grads, AdamState& state, double lr,
               double weight_decay) {
  if (lr < 0.0 || !std::isfinite(lr)) throw ValidationError("adam_step: learning rate must be >= 0");
  if (grads.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size())
    throw ShapeError("adam_step: parameter, gradient and state counts differ");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!same_shape(params[i].value, grads[i]) || !same_shape(params[i].value, state.m[i]) ||
        !same_shape(params[i].value, state.v[i]))
      throw ShapeError("adam_step: shape mismatch for '" + params[i].name + "'");
  }

  state.step += 1;
  const auto& o = state.options;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(o.beta1, t);
  const double bias2 = 1.0 - std::pow(o.beta2, t);

  for (std::size_t i = 0; i < params.size(); ++i) {
    auto theta = params[i].value.values();
    auto g = grads[i].values();
    auto m = state.m[i].values();
    auto v = state.v[i].values();
    for (std::size_t k = 0; k < theta.size(); ++k) {
      const double gk = g[k] + weight_decay * theta[k];
      m[k] = o.beta1 * m[k] + (1.0 - o.beta1) * gk;
      v[k] = o.beta2 * v[k] + (1.0 - o.beta2) * gk * gk;
      const double m_hat = m[k] / bias1;
      const double v_hat = v[k] / bias2;
      theta[k] -= lr * m_hat / (std::sqrt(v_hat) + o.epsilon);
    }
  }
}

}  // namespace rau::ad
