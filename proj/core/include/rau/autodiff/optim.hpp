#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rau/autodiff/params.hpp"
#include "rau/matrix.hpp"

namespace rau::ad {

/// Glorot/Xavier uniform: U(-sqrt(6/(rows+cols)), +sqrt(6/(rows+cols))).
Matrix xavier_uniform(std::size_t rows, std::size_t cols, std::uint64_t seed);

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First/second moment estimates, one pair per parameter tensor.
struct AdamState {
  std::vector<Matrix> m;
  std::vector<Matrix> v;
  std::uint64_t step = 0;
  AdamOptions options;

  static AdamState for_params(const ParamSet& params, AdamOptions options = {});
};

/// One bias-corrected Adam update. `weight_decay` adds a coupled L2 term
/// (weight_decay * theta) to each gradient; pass 0 when the penalty already
/// lives in the loss. lr = 0 leaves parameters untouched.
void adam_step(ParamSet& params, std::span<const Matrix> grads, AdamState& state, double lr,
               double weight_decay = 0.0);

}  // namespace rau::ad
