#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rau/graph/types.hpp"
#include "rau/model/config.hpp"
#include "rau/model/graph_view.hpp"
#include "rau/model/params.hpp"
#include "rau/random.hpp"

namespace rau::model {

struct Split {
  std::vector<Index> train;  // ascending
  std::vector<Index> test;   // ascending
};

/// Stratified split of the labeled nodes: floor(pct% of each class) goes to
/// training (at least one, and at least one left for testing when the class
/// has two or more nodes). The rest form the test split.
Split stratified_split(const graph::MultiRelationGraph& g, double train_pct, std::uint64_t seed);

/// One epoch of class-balanced seed batches. Positives and negatives alternate;
/// the majority class is visited exactly once and the minority class is
/// cycled (reshuffled on every wrap) to keep pace.
std::vector<std::vector<Index>> balanced_batches(std::span<const Index> positives, std::span<const Index> negatives,
                                                 std::size_t batch_size, SplitMix64& rng);

struct TrainResult {
  ModelParams params;
  std::vector<double> losses;  // one per optimizer step
  std::size_t epochs_run = 0;
};

/// Called after every epoch with the 0-based epoch index and current weights.
using EpochCallback = std::function<void(std::size_t epoch, const ModelParams& params)>;

/// Mini-batch training with Adam. Throws ValidationError when the training
/// nodes do not contain both classes.
TrainResult train(const PreparedGraph& g, std::span<const Index> train_nodes, const ModelConfig& config,
                  const EpochCallback& on_epoch = {});

/// Same as above, starting from the given parameters.
TrainResult train(const PreparedGraph& g, std::span<const Index> train_nodes, const ModelConfig& config,
                  ModelParams initial, const EpochCallback& on_epoch = {});

struct CheckpointMeta {
  ModelConfig config;
  std::size_t feature_dim = 0;
  std::size_t n_relations = 0;
  std::vector<std::string> relation_names;
  double train_pct = 0.0;
  std::size_t epochs_run = 0;
};

struct Checkpoint {
  ModelParams params;
  CheckpointMeta meta;
};

/// Writes weights.bin, meta.json and loss_trajectory.csv into `dir`.
void save_checkpoint(const std::filesystem::path& dir, const ModelParams& params, const CheckpointMeta& meta,
                     std::span<const double> losses);
Checkpoint load_checkpoint(const std::filesystem::path& dir);

std::string config_to_json(const CheckpointMeta& meta);
CheckpointMeta config_from_json(const std::string& text);

}  // namespace rau::model
