#pragma once

#include <cstddef>
#include <span>

#include "rau/model/config.hpp"
#include "rau/model/graph_view.hpp"
#include "rau/model/params.hpp"

namespace rau::eval {

inline constexpr double kDecisionThreshold = 0.5;

/// Positive class = anomalous (label 1).
struct MetricsReport {
  double accuracy = 0.0;
  double recall = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
  std::size_t n_eval = 0;
  /// Mean binary cross-entropy on the evaluated nodes (no regularization term).
  double loss = 0.0;
};

/// Confusion counts with the rule "predict 1 iff p >= 0.5". Recall is 0 (with
/// a warning) when the split has no positives.
MetricsReport score(std::span<const double> probabilities, std::span<const double> labels);

/// Variant-aware forward pass over the whole graph, scored on `split`.
/// Throws ValidationError on an empty split or unlabeled nodes.
MetricsReport evaluate(const model::PreparedGraph& g, const model::ModelParams& params,
                       const model::ModelConfig& config, std::span<const Index> split);

}  // namespace rau::eval
