#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rau/csr.hpp"
#include "rau/graph/types.hpp"
#include "rau/matrix.hpp"

namespace rau::model {

/// Everything a forward pass reads from a graph: per-relation normalized
/// propagation matrices, the attention pattern (merged graph plus self-loops),
/// the neighbour-mean operator over the merged graph, and node features.
struct GraphView {
  std::vector<CsrMatrix> propagation;
  CsrMatrix attention_pattern;
  CsrMatrix mean_op;
  Matrix features;

  std::size_t n() const noexcept { return features.rows(); }
};

/// A MultiRelationGraph with its normalized relations and merged graph computed
/// once. Owns its graph.
class PreparedGraph {
 public:
  explicit PreparedGraph(graph::MultiRelationGraph g);

  const graph::MultiRelationGraph& graph() const noexcept { return graph_; }
  const graph::SparseAdjacency& merged() const noexcept { return merged_; }
  const GraphView& view() const noexcept { return view_; }

 private:
  graph::MultiRelationGraph graph_;
  graph::SparseAdjacency merged_;
  GraphView view_;
};

struct SamplingOptions {
  /// Per-node cap on expanded neighbours; 0 keeps full neighbourhoods (exact).
  std::size_t max_neighbors = 0;
  std::uint64_t seed = 0;
};

/// Seed nodes plus their L-hop neighbourhood over the merged graph.
/// Local indices follow ascending global id, so the remap is monotone.
struct BatchSubgraph {
  std::vector<Index> seeds;       // global ids, batch order
  std::vector<Index> included;    // global ids, ascending
  std::vector<Index> seed_local;  // local index of each seed
  std::vector<double> seed_labels;
  std::vector<graph::Relation> relations;  // induced raw relation graphs
  GraphView view;

  std::optional<Index> local_index(Index global) const noexcept;
};

/// Breadth-first expansion for `hops` levels, then induced subgraphs. The
/// propagation matrices are the full graph's normalized matrices restricted to
/// the included nodes, so degrees are the global ones. Throws ValidationError
/// on an empty or unlabeled seed set.
BatchSubgraph sample_batch(const PreparedGraph& g, std::span<const Index> seeds, std::size_t hops,
                           const SamplingOptions& options = {});

}  // namespace rau::model
