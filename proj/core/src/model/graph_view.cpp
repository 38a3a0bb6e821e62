#include "rau/model/graph_view.hpp"

#include <algorithm>
#include <string>

#include "rau/error.hpp"
#include "rau/graph/ops.hpp"
#include "rau/random.hpp"

namespace rau::model {

PreparedGraph::PreparedGraph(graph::MultiRelationGraph g)
    : graph_(std::move(g)), merged_(graph::merge_relations(graph_)) {
  for (const auto& rel : graph_.relations())
    view_.propagation.push_back(graph::normalize(rel.adjacency).matrix());
  view_.attention_pattern = graph::with_self_loops(merged_);
  view_.mean_op = graph::mean_operator(merged_);
  view_.features = graph_.features();
}

std::optional<Index> BatchSubgraph::local_index(Index global) const noexcept {
  auto it = std::lower_bound(included.begin(), included.end(), global);
  if (it == included.end() || *it != global) return std::nullopt;
  return static_cast<Index>(it - included.begin());
}

BatchSubgraph sample_batch(const PreparedGraph& g, std::span<const Index> seeds, std::size_t hops,
                           const SamplingOptions& options) {
  if (seeds.empty()) throw ValidationError("sample_batch: empty seed set");
  if (hops == 0) throw ValidationError("sample_batch: hops must be >= 1");
  const auto& base = g.graph();
  const std::size_t n = base.n();
  for (Index s : seeds) {
    if (s >= n) throw ValidationError("sample_batch: seed " + std::to_string(s) + " out of range");
    if (!graph::is_labeled(base.labels()[s]))
      throw ValidationError("sample_batch: seed " + std::to_string(s) + " is unlabeled");
  }

  const CsrMatrix& merged = g.merged().matrix();
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<Index> frontier;
  for (Index s : seeds) {
    if (!seen[s]) {
      seen[s] = 1;
      frontier.push_back(s);
    }
  }
  std::vector<Index> next;
  std::vector<Index> candidates;
  for (std::size_t h = 0; h < hops && !frontier.empty(); ++h) {
    next.clear();
    for (Index u : frontier) {
      auto nbrs = merged.row_cols(u);
      if (options.max_neighbors > 0 && nbrs.size() > options.max_neighbors) {
        candidates.assign(nbrs.begin(), nbrs.end());
        SplitMix64 rng(derive_seed(options.seed, u));
        shuffle(std::span<Index>(candidates), rng);
        candidates.resize(options.max_neighbors);
        std::sort(candidates.begin(), candidates.end());
        nbrs = candidates;
      }
      for (Index v : nbrs) {
        if (seen[v]) continue;
        seen[v] = 1;
        next.push_back(v);
      }
    }
    frontier.swap(next);
  }

  BatchSubgraph b;
  b.seeds.assign(seeds.begin(), seeds.end());
  for (std::size_t i = 0; i < n; ++i)
    if (seen[i]) b.included.push_back(static_cast<Index>(i));
  for (Index s : b.seeds) {
    b.seed_local.push_back(*b.local_index(s));
    b.seed_labels.push_back(graph::label_value(base.labels()[s]));
  }

  for (const auto& rel : base.relations())
    b.relations.push_back({rel.name, graph::SparseAdjacency(graph::induced(rel.adjacency.matrix(), b.included))});
  for (const auto& p : g.view().propagation) b.view.propagation.push_back(graph::induced(p, b.included));
  graph::SparseAdjacency merged_local(graph::induced(merged, b.included));
  b.view.attention_pattern = graph::with_self_loops(merged_local);
  b.view.mean_op = graph::mean_operator(merged_local);

  const Matrix& x = base.features();
  b.view.features = Matrix(b.included.size(), x.cols());
  for (std::size_t i = 0; i < b.included.size(); ++i)
    std::copy(x.row(b.included[i]).begin(), x.row(b.included[i]).end(), b.view.features.row(i).begin());
  return b;
}

}  // namespace rau::model
