#include "rau/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <spdlog/spdlog.h>

#include "rau/autodiff/ops.hpp"
#include "rau/error.hpp"
#include "rau/model/forward.hpp"

namespace rau::eval {

MetricsReport score(std::span<const double> probabilities, std::span<const double> labels) {
  if (probabilities.size() != labels.size()) throw ValidationError("score: probability/label count mismatch");
  if (labels.empty()) throw ValidationError("score: empty evaluation split");
  MetricsReport m;
  m.n_eval = labels.size();
  double loss = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool positive = labels[i] == 1.0;
    const bool predicted = probabilities[i] >= kDecisionThreshold;
    if (positive && predicted) ++m.tp;
    else if (positive) ++m.fn;
    else if (predicted) ++m.fp;
    else ++m.tn;
    const double p = std::clamp(probabilities[i], ad::kProbabilityClamp, 1.0 - ad::kProbabilityClamp);
    loss -= positive ? std::log(p) : std::log(1.0 - p);
  }
  m.loss = loss / static_cast<double>(m.n_eval);
  m.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(m.n_eval);
  if (m.tp + m.fn == 0) {
    spdlog::warn("evaluation split has no anomalous nodes; recall reported as 0");
    m.recall = 0.0;
  } else {
    m.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  }
  return m;
}

MetricsReport evaluate(const model::PreparedGraph& g, const model::ModelParams& params,
                       const model::ModelConfig& config, std::span<const Index> split) {
  if (split.empty()) throw ValidationError("evaluate: empty evaluation split");
  std::vector<double> labels;
  labels.reserve(split.size());
  for (Index v : split) {
    if (v >= g.graph().n()) throw ValidationError("evaluate: node index out of range");
    if (!graph::is_labeled(g.graph().labels()[v]))
      throw ValidationError("evaluate: node " + std::to_string(v) + " is unlabeled");
    labels.push_back(graph::label_value(g.graph().labels()[v]));
  }
  const model::Prediction pred = model::predict(g.view(), params, config);
  std::vector<double> probs;
  probs.reserve(split.size());
  for (Index v : split) probs.push_back(pred.probability[v]);
  return score(probs, labels);
}

}  // namespace rau::eval
