#include "rau/synth/generator.hpp"

#include <algorithm>
#include <cmath>

#include "rau/error.hpp"
#include "rau/graph/ops.hpp"
#include "rau/random.hpp"

namespace rau::synth {

namespace {

// Discrete Zipf over ranks 0..m-1 with P(k) proportional to (k+1)^-s.
class ZipfTable {
 public:
  ZipfTable(std::size_t m, double s) : cdf_(m) {
    double total = 0.0;
    for (std::size_t k = 0; k < m; ++k) cdf_[k] = total += std::pow(static_cast<double>(k + 1), -s);
    for (double& c : cdf_) c /= total;
  }

  std::size_t draw(SplitMix64& rng) const {
    const double u = rng.uniform();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

std::vector<std::vector<Index>> chunk(const std::vector<Index>& members, std::size_t size) {
  std::vector<std::vector<Index>> out;
  for (std::size_t i = 0; i < members.size(); i += size)
    out.emplace_back(members.begin() + static_cast<std::ptrdiff_t>(i),
                     members.begin() + static_cast<std::ptrdiff_t>(std::min(members.size(), i + size)));
  // a trailing singleton would have nobody to co-occur with
  if (out.size() > 1 && out.back().size() < 2) {
    out[out.size() - 2].insert(out[out.size() - 2].end(), out.back().begin(), out.back().end());
    out.pop_back();
  }
  return out;
}

}  // namespace

void SynthConfig::validate() const {
  if (n_users < 2) throw ValidationError("synth: n_users must be >= 2");
  if (!(anomaly_fraction > 0.0 && anomaly_fraction < 1.0))
    throw ValidationError("synth: anomaly_fraction must be in (0, 1)");
  if (!(camouflage_rate >= 0.0 && camouflage_rate <= 1.0))
    throw ValidationError("synth: camouflage_rate must be in [0, 1]");
  if (!(camouflage_spread >= 0.0) || !std::isfinite(camouflage_spread))
    throw ValidationError("synth: camouflage_spread must be >= 0");
  if (!(hub_rate >= 0.0 && hub_rate <= 1.0)) throw ValidationError("synth: hub_rate must be in [0, 1]");
  if (n_relations == 0) throw ValidationError("synth: n_relations must be >= 1");
  if (feature_dim == 0) throw ValidationError("synth: feature_dim must be >= 1");
  if (!std::isfinite(feature_shift)) throw ValidationError("synth: feature_shift must be finite");
  if (!(zipf_exponent > 0.0) || !std::isfinite(zipf_exponent)) throw ValidationError("synth: zipf_exponent must be > 0");
  if (attachments_per_user == 0) throw ValidationError("synth: attachments_per_user must be >= 1");
  if (campaign_size == 0 || campaign_entities == 0 || community_size == 0)
    throw ValidationError("synth: campaign_size, campaign_entities and community_size must be >= 1");
  const std::size_t anomalous = anomaly_count();
  if (anomalous == 0 || anomalous == n_users)
    throw ValidationError("synth: anomaly_fraction leaves one class empty for n_users = " + std::to_string(n_users));
  const std::size_t communities = (n_users - anomalous + community_size - 1) / community_size;
  if (benign_entity_count() < communities)
    throw ValidationError("synth: entities_per_relation must be at least the number of benign communities (" +
                          std::to_string(communities) + ")");
}

std::size_t SynthConfig::anomaly_count() const noexcept {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n_users) * anomaly_fraction));
}

std::size_t SynthConfig::benign_entity_count() const noexcept {
  return entities_per_relation > 0 ? entities_per_relation : n_users;
}

double SynthConfig::relation_camouflage(std::size_t r) const noexcept {
  if (n_relations < 2) return camouflage_rate;
  const double t = 2.0 * static_cast<double>(r) / static_cast<double>(n_relations - 1) - 1.0;
  return std::clamp(camouflage_rate * (1.0 + camouflage_spread * t), 0.0, 1.0);
}

std::string relation_name(std::size_t r) {
  static constexpr const char* kNames[] = {"f", "c", "p", "h"};
  return r < 4 ? kNames[r] : "r" + std::to_string(r);
}

SynthDataset generate_dataset(const SynthConfig& config) {
  config.validate();
  const std::size_t n = config.n_users;
  const std::size_t n_anom = config.anomaly_count();

  SynthDataset data;
  std::vector<Index> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<Index>(i);
  SplitMix64 assign_rng(derive_seed(config.seed, "labels"));
  shuffle(std::span<Index>(order), assign_rng);

  data.labels.assign(n, graph::Label::kBenign);
  std::vector<Index> anomalous(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_anom));
  std::vector<Index> benign(order.begin() + static_cast<std::ptrdiff_t>(n_anom), order.end());
  for (Index v : anomalous) data.labels[v] = graph::Label::kAnomalous;

  data.node_ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) data.node_ids.push_back("u" + std::to_string(i));

  SplitMix64 feature_rng(derive_seed(config.seed, "features"));
  data.features = Matrix(n, config.feature_dim);
  for (std::size_t i = 0; i < n; ++i) {
    const double mean = data.labels[i] == graph::Label::kAnomalous ? config.feature_shift : 0.0;
    for (double& x : data.features.row(i)) x = mean + feature_rng.normal();
  }

  const auto campaigns = chunk(anomalous, config.campaign_size);
  const auto communities = chunk(benign, config.community_size);
  const std::size_t pool = config.benign_entity_count();
  const std::size_t slice = pool / communities.size();
  const ZipfTable local(slice, config.zipf_exponent);
  const ZipfTable global(pool, config.zipf_exponent);
  const std::size_t n_entities = pool + campaigns.size() * config.campaign_entities;

  auto community_entity = [&](std::size_t c, SplitMix64& rng) {
    return static_cast<Index>(c * slice + local.draw(rng));
  };

  for (std::size_t r = 0; r < config.n_relations; ++r) {
    graph::NamedIncidence rel;
    rel.name = relation_name(r);
    rel.incidence.n_users = n;
    rel.incidence.n_entities = n_entities;
    SplitMix64 rng(derive_seed(config.seed, "relation:" + rel.name));
    const double camouflage = config.relation_camouflage(r);
    auto& entries = rel.incidence.entries;

    for (std::size_t c = 0; c < communities.size(); ++c) {
      for (Index u : communities[c]) {
        for (std::size_t a = 0; a < config.attachments_per_user; ++a) {
          const Index e = rng.bernoulli(config.hub_rate) ? static_cast<Index>(global.draw(rng)) : community_entity(c, rng);
          entries.emplace_back(u, e);
        }
      }
    }
    for (std::size_t g = 0; g < campaigns.size(); ++g) {
      for (Index u : campaigns[g]) {
        for (std::size_t a = 0; a < config.attachments_per_user; ++a) {
          Index e = 0;
          if (rng.bernoulli(camouflage))
            e = community_entity(rng.below(communities.size()), rng);
          else
            e = static_cast<Index>(pool + g * config.campaign_entities + rng.below(config.campaign_entities));
          entries.emplace_back(u, e);
        }
      }
    }
    std::sort(entries.begin(), entries.end());
    entries.erase(std::unique(entries.begin(), entries.end()), entries.end());
    data.relations.push_back(std::move(rel));
  }
  return data;
}

graph::MultiRelationGraph build_graph(const SynthDataset& data, const graph::RelationBuildOptions& options) {
  std::vector<graph::Relation> relations;
  for (const auto& rel : data.relations)
    relations.push_back({rel.name, graph::build_relation_graph(rel.incidence, options)});
  return graph::MultiRelationGraph(data.features, std::move(relations), data.labels, data.node_ids);
}

graph::MultiRelationGraph generate(const SynthConfig& config) { return build_graph(generate_dataset(config)); }

void write_dataset(const std::filesystem::path& dir, const SynthDataset& data) {
  graph::write_dataset_dir(dir, data.features, data.labels, data.node_ids, data.relations);
}

}  // namespace rau::synth
