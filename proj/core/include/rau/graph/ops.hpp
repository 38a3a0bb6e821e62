#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rau/graph/types.hpp"

namespace rau::graph {

struct RelationBuildOptions {
  /// Entities touched by more users than this are skipped. 0 disables the cap.
  std::size_t max_entity_degree = 1000;
};

struct RelationBuildReport {
  std::vector<Index> dropped_entities;
  std::vector<std::size_t> dropped_degrees;
};

/// Projects a user-entity incidence onto users: W * W^T with the diagonal
/// removed, so entry (i, j) counts the entities users i and j share.
/// Entities above the degree cap are skipped and logged.
SparseAdjacency build_relation_graph(const IncidenceMatrix& incidence,
                                     const RelationBuildOptions& options = {},
                                     RelationBuildReport* report = nullptr);

/// Edge-set union with summed weights.
SparseAdjacency merge_relations(std::span<const SparseAdjacency> relations);
SparseAdjacency merge_relations(const MultiRelationGraph& g);

bool is_symmetric(const CsrMatrix& m) noexcept;

/// Symmetric normalization with self-loops. Throws ValidationError when the
/// input is not square and symmetric.
NormalizedAdjacency normalize(const CsrMatrix& adjacency);
NormalizedAdjacency normalize(const SparseAdjacency& adjacency);

Matrix sp_dense_matmul(const NormalizedAdjacency& adj, const Matrix& h);
Matrix sp_dense_matmul(const SparseAdjacency& adj, const Matrix& h);

/// Structural pattern of A + I with unit values.
CsrMatrix with_self_loops(const SparseAdjacency& adj);

/// Row i holds 1/|N(i)| at each neighbour j (self excluded); isolated rows are empty.
CsrMatrix mean_operator(const SparseAdjacency& adj);

/// Rows and columns of `m` restricted to `nodes` (ascending), re-indexed 0..k-1.
CsrMatrix induced(const CsrMatrix& m, std::span<const Index> nodes);

}  // namespace rau::graph
