#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rau/graph/io.hpp"
#include "rau/graph/types.hpp"

namespace rau::synth {

struct SynthConfig {
  std::size_t n_users = 2000;
  double anomaly_fraction = 0.2;
  std::size_t n_relations = 3;
  std::size_t feature_dim = 16;
  /// Mean offset of anomalous features, per dimension.
  double feature_shift = 0.5;
  /// Probability that an anomalous user's attachment goes to a benign entity,
  /// averaged over relations.
  double camouflage_rate = 0.5;
  /// Relations differ in how much anomalous users hide in them: relation r uses
  /// camouflage_rate * (1 + spread * (2r/(R-1) - 1)), clipped to [0, 1], so the
  /// first relation is the least camouflaged and the last the most. A zero rate
  /// stays zero everywhere.
  double camouflage_spread = 0.8;
  /// Benign entities per relation; 0 sizes the pool from n_users.
  std::size_t entities_per_relation = 0;
  std::uint64_t seed = 0;

  /// Entity attachments drawn per user and relation.
  std::size_t attachments_per_user = 2;
  /// Anomalous users per campaign group and campaign entities per group and relation.
  std::size_t campaign_size = 15;
  std::size_t campaign_entities = 2;
  /// Benign users per community; each community draws from its own slice of the entity pool.
  std::size_t community_size = 40;
  /// Share of benign attachments drawn from the global popularity ranking (hub entities).
  double hub_rate = 0.05;
  double zipf_exponent = 1.1;

  /// Throws ValidationError on an infeasible configuration.
  void validate() const;
  std::size_t anomaly_count() const noexcept;
  std::size_t benign_entity_count() const noexcept;
  double relation_camouflage(std::size_t r) const noexcept;
};

struct SynthDataset {
  Matrix features;
  std::vector<graph::Label> labels;
  std::vector<std::string> node_ids;
  std::vector<graph::NamedIncidence> relations;  // f, c, p, h, r4, ...
};

/// Relation tag for index r: f, c, p, h, then r4, r5, ...
std::string relation_name(std::size_t r);

SynthDataset generate_dataset(const SynthConfig& config);

/// Projects the generated incidences into a fully labeled graph.
graph::MultiRelationGraph build_graph(const SynthDataset& data,
                                      const graph::RelationBuildOptions& options = {});

graph::MultiRelationGraph generate(const SynthConfig& config);

/// Writes the dataset in the ingest directory layout.
void write_dataset(const std::filesystem::path& dir, const SynthDataset& data);

}  // namespace rau::synth
