#include "rau/model/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <spdlog/spdlog.h>

#include "rau/autodiff/optim.hpp"
#include "rau/error.hpp"
#include "rau/layers/layers.hpp"
#include "rau/model/forward.hpp"

namespace rau::model {

Split stratified_split(const graph::MultiRelationGraph& g, double train_pct, std::uint64_t seed) {
  if (!(train_pct > 0.0 && train_pct < 100.0)) throw ValidationError("split: train_pct must be in (0, 100)");
  Split s;
  SplitMix64 rng(derive_seed(seed, "split"));
  for (graph::Label cls : {graph::Label::kBenign, graph::Label::kAnomalous}) {
    std::vector<Index> members;
    for (std::size_t i = 0; i < g.n(); ++i)
      if (g.labels()[i] == cls) members.push_back(static_cast<Index>(i));
    if (members.empty()) continue;
    shuffle(std::span<Index>(members), rng);
    auto k = static_cast<std::size_t>(std::floor(static_cast<double>(members.size()) * train_pct / 100.0));
    k = std::max<std::size_t>(k, 1);
    if (members.size() >= 2) k = std::min(k, members.size() - 1);
    s.train.insert(s.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(k));
    s.test.insert(s.test.end(), members.begin() + static_cast<std::ptrdiff_t>(k), members.end());
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

std::vector<std::vector<Index>> balanced_batches(std::span<const Index> positives, std::span<const Index> negatives,
                                                 std::size_t batch_size, SplitMix64& rng) {
  if (positives.empty() || negatives.empty()) throw ValidationError("balanced_batches: both classes are required");
  if (batch_size == 0) throw ValidationError("balanced_batches: batch_size must be >= 1");
  std::vector<Index> pos(positives.begin(), positives.end());
  std::vector<Index> neg(negatives.begin(), negatives.end());
  shuffle(std::span<Index>(pos), rng);
  shuffle(std::span<Index>(neg), rng);

  const bool pos_major = pos.size() >= neg.size();
  std::vector<Index>& major = pos_major ? pos : neg;
  std::vector<Index>& minor = pos_major ? neg : pos;
  std::vector<Index> order;
  order.reserve(2 * major.size());
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < major.size(); ++i) {
    if (cursor == minor.size()) {
      shuffle(std::span<Index>(minor), rng);
      cursor = 0;
    }
    const Index p = pos_major ? major[i] : minor[cursor];
    const Index q = pos_major ? minor[cursor] : major[i];
    ++cursor;
    order.push_back(p);
    order.push_back(q);
  }

  std::vector<std::vector<Index>> batches;
  for (std::size_t i = 0; i < order.size(); i += batch_size) {
    const std::size_t end = std::min(order.size(), i + batch_size);
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i), order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

TrainResult train(const PreparedGraph& g, std::span<const Index> train_nodes, const ModelConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  return train(g, train_nodes, config,
               ModelParams::initialize(config, g.graph().feature_dim(), g.graph().relation_count()), on_epoch);
}

TrainResult train(const PreparedGraph& g, std::span<const Index> train_nodes, const ModelConfig& config,
                  ModelParams initial, const EpochCallback& on_epoch) {
  config.validate();
  std::vector<Index> pos, neg;
  for (Index v : train_nodes) {
    if (v >= g.graph().n()) throw ValidationError("train: node index out of range");
    switch (g.graph().labels()[v]) {
      case graph::Label::kAnomalous: pos.push_back(v); break;
      case graph::Label::kBenign: neg.push_back(v); break;
      case graph::Label::kUnlabeled: throw ValidationError("train: training node " + std::to_string(v) + " is unlabeled");
    }
  }
  if (pos.empty() || neg.empty())
    throw ValidationError("train: training split holds a single class (" + std::to_string(pos.size()) +
                          " anomalous, " + std::to_string(neg.size()) + " benign); both are required");

  TrainResult result;
  result.params = std::move(initial);
  ad::AdamState adam = ad::AdamState::for_params(result.params.tensors());
  SplitMix64 batch_rng(derive_seed(config.seed, "batches"));
  const std::size_t hops = config.effective_hops();

  double best_epoch_loss = std::numeric_limits<double>::infinity();
  std::size_t stale_epochs = 0;
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto batches = balanced_batches(pos, neg, config.batch_size, batch_rng);
    double epoch_loss = 0.0;
    for (const auto& seeds : batches) {
      const SamplingOptions sampling{config.max_neighbors, derive_seed(config.seed, step)};
      const BatchSubgraph batch = sample_batch(g, seeds, hops, sampling);

      ad::Tape tape;
      BoundParams bound(result.params, result.params.tensors().bind(tape));
      ForwardResult f = forward(tape, batch.view, bound, config, batch.seed_local);
      ad::Var loss = layers::detection_loss(f.probability, batch.seed_labels, bound.all(), config.lambda);
      tape.backward(loss);

      const double value = loss.value()(0, 0);
      result.losses.push_back(value);
      epoch_loss += value;
      ad::adam_step(result.params.tensors(), ad::collect_grads(result.params.tensors(), bound.all()), adam, config.lr);
      ++step;
    }
    result.epochs_run = epoch + 1;
    epoch_loss /= static_cast<double>(batches.size());
    spdlog::debug("epoch {} mean loss {:.6f}", epoch, epoch_loss);
    if (on_epoch) on_epoch(epoch, result.params);

    if (config.patience > 0) {
      if (epoch_loss < best_epoch_loss) {
        best_epoch_loss = epoch_loss;
        stale_epochs = 0;
      } else if (++stale_epochs >= config.patience) {
        spdlog::info("early stop after epoch {} (no improvement for {} epochs)", epoch, config.patience);
        break;
      }
    }
  }
  return result;
}

}  // namespace rau::model
