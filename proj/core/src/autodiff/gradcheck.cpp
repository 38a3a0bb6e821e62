#include "rau/autodiff/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace rau::ad {
namespace {

double evaluate(const ParamSet& params, const LossBuilder& build) {
  Tape tape;
  auto vars = params.bind_constant(tape);
  return build(tape, vars).value()(0, 0);
}

}  // namespace

double relative_error(double analytic, double numeric, double floor) noexcept {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckResult check_gradients(ParamSet& params, const LossBuilder& build,
                                const GradCheckOptions& options) {
  GradCheckResult result;
  if (params.empty() || params.scalar_count() == 0) {
    result.diagnostic = "no parameters to check";
    return result;
  }

  std::vector<Matrix> analytic;
  {
    Tape tape;
    auto vars = params.bind(tape);
    Var loss = build(tape, vars);
    tape.backward(loss);
    analytic = collect_grads(params, vars);
  }
  if (analytic.size() != params.size()) {
    result.diagnostic = "gradient count " + std::to_string(analytic.size()) + " does not match parameter count " +
                        std::to_string(params.size());
    return result;
  }

  for (std::size_t p = 0; p < params.size(); ++p) {
    auto theta = params[p].value.values();
    for (std::size_t k = 0; k < theta.size(); ++k) {
      const double saved = theta[k];
      theta[k] = saved + options.step;
      const double up = evaluate(params, build);
      theta[k] = saved - options.step;
      const double down = evaluate(params, build);
      theta[k] = saved;

      const double numeric = (up - down) / (2.0 * options.step);
      const double a = analytic[p].values()[k];
      const double err = relative_error(a, numeric, options.magnitude_floor);
      ++result.checked;
      if (err > result.max_relative_error || result.checked == 1) {
        result.max_relative_error = err;
        result.worst_parameter = params[p].name;
        result.worst_index = k;
        result.worst_analytic = a;
        result.worst_numeric = numeric;
      }
    }
  }
  result.passed = result.max_relative_error < options.tolerance;
  return result;
}

}  // namespace rau::ad
