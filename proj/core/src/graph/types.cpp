#include "rau/graph/types.hpp"

#include <algorithm>
#include <string>

#include "rau/error.hpp"
#include "rau/graph/ops.hpp"

namespace rau::graph {

void IncidenceMatrix::validate() const {
  for (const auto& [u, e] : entries) {
    if (u >= n_users) throw ValidationError("incidence: user index " + std::to_string(u) + " out of range");
    if (e >= n_entities)
      throw ValidationError("incidence: entity index " + std::to_string(e) + " out of range");
  }
  auto sorted = entries;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ValidationError("incidence: duplicate (user, entity) pair");
}

SparseAdjacency::SparseAdjacency(CsrMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols()) throw ValidationError("adjacency: matrix is not square");
  for (std::size_t r = 0; r < matrix_.rows(); ++r) {
    auto cols = matrix_.row_cols(r);
    auto vals = matrix_.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (cols[k] == r) throw ValidationError("adjacency: nonzero diagonal at node " + std::to_string(r));
      if (vals[k] < 0.0) throw ValidationError("adjacency: negative weight");
    }
  }
  if (!is_symmetric(matrix_)) throw ValidationError("adjacency: matrix is not symmetric");
}

SparseAdjacency SparseAdjacency::zeros(std::size_t n) { return SparseAdjacency(CsrMatrix(n, n)); }

SparseAdjacency SparseAdjacency::from_edges(std::size_t n,
                                            std::span<const std::pair<Index, Index>> edges) {
  std::vector<std::pair<Index, Index>> both;
  both.reserve(edges.size() * 2);
  for (auto [a, b] : edges) {
    if (a >= n || b >= n) throw ValidationError("edge endpoint out of range");
    if (a == b) continue;
    both.emplace_back(a, b);
    both.emplace_back(b, a);
  }
  std::sort(both.begin(), both.end());
  both.erase(std::unique(both.begin(), both.end()), both.end());
  std::vector<Triplet> t;
  t.reserve(both.size());
  for (auto [a, b] : both) t.push_back({a, b, 1.0});
  return SparseAdjacency(CsrMatrix::from_triplets(n, n, std::move(t)));
}

MultiRelationGraph::MultiRelationGraph(Matrix features, std::vector<Relation> relations,
                                       std::vector<Label> labels, std::vector<std::string> node_ids)
    : features_(std::move(features)),
      relations_(std::move(relations)),
      labels_(std::move(labels)),
      node_ids_(std::move(node_ids)) {
  if (relations_.empty()) throw ValidationError("graph: at least one relation is required");
  if (features_.cols() == 0) throw ValidationError("graph: feature dimension must be >= 1");
  if (!features_.all_finite()) throw ValidationError("graph: non-finite feature value");
  for (const auto& rel : relations_) {
    if (rel.adjacency.n() != n())
      throw ValidationError("graph: relation '" + rel.name + "' has " +
                            std::to_string(rel.adjacency.n()) + " nodes, expected " +
                            std::to_string(n()));
  }
  if (labels_.size() != n()) throw ValidationError("graph: label count does not match node count");
  if (!node_ids_.empty() && node_ids_.size() != n())
    throw ValidationError("graph: node id count does not match node count");
}

std::vector<Index> MultiRelationGraph::labeled_nodes() const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (is_labeled(labels_[i])) out.push_back(static_cast<Index>(i));
  return out;
}

std::size_t MultiRelationGraph::count_label(Label l) const noexcept {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), l));
}

}  // namespace rau::graph
