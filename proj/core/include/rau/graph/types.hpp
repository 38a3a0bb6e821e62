#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rau/csr.hpp"
#include "rau/matrix.hpp"

namespace rau::graph {

enum class Label : std::int8_t { kUnlabeled = -1, kBenign = 0, kAnomalous = 1 };

inline bool is_labeled(Label l) noexcept { return l != Label::kUnlabeled; }
inline double label_value(Label l) noexcept { return l == Label::kAnomalous ? 1.0 : 0.0; }

/// Binary user-entity occurrence matrix for one relation type.
struct IncidenceMatrix {
  std::size_t n_users = 0;
  std::size_t n_entities = 0;
  std::vector<std::pair<Index, Index>> entries;  // (user, entity)

  /// Throws ValidationError on out-of-range indices or duplicate pairs.
  void validate() const;
};

/// Undirected weighted user-user graph: structurally symmetric with equal
/// weights, zero diagonal, non-negative weights.
class SparseAdjacency {
 public:
  SparseAdjacency() = default;
  explicit SparseAdjacency(CsrMatrix matrix);

  static SparseAdjacency zeros(std::size_t n);
  /// Unit-weight undirected graph from an edge list; self-edges and repeated
  /// edges are dropped.
  static SparseAdjacency from_edges(std::size_t n, std::span<const std::pair<Index, Index>> edges);

  std::size_t n() const noexcept { return matrix_.rows(); }
  std::size_t edge_count() const noexcept { return matrix_.nnz() / 2; }
  const CsrMatrix& matrix() const noexcept { return matrix_; }

  friend bool operator==(const SparseAdjacency&, const SparseAdjacency&) = default;

 private:
  CsrMatrix matrix_;
};

/// D^{-1/2} (U + I) D^{-1/2}. Only produced by normalize().
class NormalizedAdjacency {
 public:
  NormalizedAdjacency() = default;

  std::size_t n() const noexcept { return matrix_.rows(); }
  const CsrMatrix& matrix() const noexcept { return matrix_; }

 private:
  friend NormalizedAdjacency normalize(const CsrMatrix& adjacency);
  explicit NormalizedAdjacency(CsrMatrix m) : matrix_(std::move(m)) {}
  CsrMatrix matrix_;
};

struct Relation {
  std::string name;
  SparseAdjacency adjacency;

  friend bool operator==(const Relation&, const Relation&) = default;
};

/// One node set, R parallel relation graphs, dense features and partial labels.
class MultiRelationGraph {
 public:
  MultiRelationGraph() = default;
  MultiRelationGraph(Matrix features, std::vector<Relation> relations, std::vector<Label> labels,
                     std::vector<std::string> node_ids = {});

  std::size_t n() const noexcept { return features_.rows(); }
  std::size_t feature_dim() const noexcept { return features_.cols(); }
  std::size_t relation_count() const noexcept { return relations_.size(); }

  const Matrix& features() const noexcept { return features_; }
  const std::vector<Relation>& relations() const noexcept { return relations_; }
  const SparseAdjacency& relation(std::size_t r) const { return relations_.at(r).adjacency; }
  const std::vector<Label>& labels() const noexcept { return labels_; }
  /// Empty when the graph was built without external ids.
  const std::vector<std::string>& node_ids() const noexcept { return node_ids_; }

  std::vector<Index> labeled_nodes() const;
  std::size_t count_label(Label l) const noexcept;

  friend bool operator==(const MultiRelationGraph&, const MultiRelationGraph&) = default;

 private:
  Matrix features_;
  std::vector<Relation> relations_;
  std::vector<Label> labels_;
  std::vector<std::string> node_ids_;
};

}  // namespace rau::graph
