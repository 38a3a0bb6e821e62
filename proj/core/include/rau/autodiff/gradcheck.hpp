#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rau/autodiff/params.hpp"

namespace rau::ad {

struct GradCheckOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  /// Denominator floor for the relative error |a - n| / max(|a|, |n|, floor).
  /// Entries whose true gradient is smaller than this are effectively compared
  /// in absolute terms, where central differences lose their relative accuracy.
  double magnitude_floor = 1e-6;
};

struct GradCheckResult {
  bool passed = false;
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
  /// Non-empty when the check could not run (e.g. no parameters).
  std::string diagnostic;
};

/// Builds a scalar loss from bound parameters (one Var per ParamSet entry, in order).
using LossBuilder = std::function<Var(Tape& tape, std::span<const Var> params)>;

double relative_error(double analytic, double numeric, double floor) noexcept;

/// Compares reverse-mode gradients against central finite differences for every
/// scalar of every parameter. `params` is perturbed in place and restored.
GradCheckResult check_gradients(ParamSet& params, const LossBuilder& build,
                                const GradCheckOptions& options = {});

}  // namespace rau::ad
