#include "rau/graph/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <spdlog/spdlog.h>

#include "rau/error.hpp"

namespace rau::graph {

SparseAdjacency build_relation_graph(const IncidenceMatrix& incidence,
                                     const RelationBuildOptions& options,
                                     RelationBuildReport* report) {
  incidence.validate();
  const std::size_t n = incidence.n_users;

  std::vector<std::vector<Index>> users_of(incidence.n_entities);
  std::vector<std::vector<Index>> entities_of(n);
  for (const auto& [u, e] : incidence.entries) {
    users_of[e].push_back(u);
    entities_of[u].push_back(e);
  }

  std::vector<bool> skipped(incidence.n_entities, false);
  for (std::size_t e = 0; e < users_of.size(); ++e) {
    const std::size_t degree = users_of[e].size();
    if (options.max_entity_degree > 0 && degree > options.max_entity_degree) {
      skipped[e] = true;
      spdlog::warn("relation build: skipping entity {} with degree {} (cap {})", e, degree,
                   options.max_entity_degree);
      if (report) {
        report->dropped_entities.push_back(static_cast<Index>(e));
        report->dropped_degrees.push_back(degree);
      }
    }
  }

  // Row-by-row sparse product (Gustavson): accumulate shared-entity counts for
  // user i in a dense scratch row, then emit the touched columns in order.
  std::vector<std::size_t> row_ptr(n + 1, 0);
  std::vector<Index> col_idx;
  std::vector<double> values;
  std::vector<double> scratch(n, 0.0);
  std::vector<Index> touched;
  for (std::size_t i = 0; i < n; ++i) {
    touched.clear();
    for (Index e : entities_of[i]) {
      if (skipped[e]) continue;
      for (Index j : users_of[e]) {
        if (j == i) continue;
        if (scratch[j] == 0.0) touched.push_back(j);
        scratch[j] += 1.0;
      }
    }
    std::sort(touched.begin(), touched.end());
    for (Index j : touched) {
      col_idx.push_back(j);
      values.push_back(scratch[j]);
      scratch[j] = 0.0;
    }
    row_ptr[i + 1] = col_idx.size();
  }
  return SparseAdjacency(CsrMatrix(n, n, std::move(row_ptr), std::move(col_idx), std::move(values)));
}

SparseAdjacency merge_relations(std::span<const SparseAdjacency> relations) {
  if (relations.empty()) throw ValidationError("merge_relations: no relations");
  const std::size_t n = relations.front().n();
  std::vector<Triplet> all;
  for (const auto& rel : relations) {
    if (rel.n() != n) throw ShapeError("merge_relations: relations disagree on node count");
    const auto& m = rel.matrix();
    for (std::size_t r = 0; r < n; ++r) {
      auto cols = m.row_cols(r);
      auto vals = m.row_values(r);
      for (std::size_t k = 0; k < cols.size(); ++k)
        all.push_back({static_cast<Index>(r), cols[k], vals[k]});
    }
  }
  // from_triplets sorts by (row, col, value) before summing, which makes the
  // result independent of relation order.
  return SparseAdjacency(CsrMatrix::from_triplets(n, n, std::move(all)));
}

SparseAdjacency merge_relations(const MultiRelationGraph& g) {
  std::vector<SparseAdjacency> rels;
  rels.reserve(g.relation_count());
  for (const auto& r : g.relations()) rels.push_back(r.adjacency);
  return merge_relations(rels);
}

bool is_symmetric(const CsrMatrix& m) noexcept {
  if (m.rows() != m.cols()) return false;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto cols = m.row_cols(r);
    auto vals = m.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (!m.contains(cols[k], r) || m.at(cols[k], r) != vals[k]) return false;
    }
  }
  return true;
}

NormalizedAdjacency normalize(const CsrMatrix& adjacency) {
  if (!is_symmetric(adjacency)) throw ValidationError("normalize: adjacency is not symmetric");
  const std::size_t n = adjacency.rows();

  std::vector<double> degree(n, 1.0);  // self-loop
  for (std::size_t r = 0; r < n; ++r) {
    auto cols = adjacency.row_cols(r);
    auto vals = adjacency.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) degree[r] += vals[k];
  }
  std::vector<double> inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(degree[i]);

  std::vector<std::size_t> row_ptr(n + 1, 0);
  std::vector<Index> col_idx;
  std::vector<double> values;
  col_idx.reserve(adjacency.nnz() + n);
  values.reserve(adjacency.nnz() + n);
  for (std::size_t r = 0; r < n; ++r) {
    auto cols = adjacency.row_cols(r);
    auto vals = adjacency.row_values(r);
    bool self_done = false;
    auto emit_self = [&] {
      double w = 1.0 + adjacency.at(r, r);
      col_idx.push_back(static_cast<Index>(r));
      values.push_back(w * inv_sqrt[r] * inv_sqrt[r]);
      self_done = true;
    };
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (cols[k] == r) continue;
      if (!self_done && cols[k] > r) emit_self();
      col_idx.push_back(cols[k]);
      values.push_back(vals[k] * inv_sqrt[r] * inv_sqrt[cols[k]]);
    }
    if (!self_done) emit_self();
    row_ptr[r + 1] = col_idx.size();
  }
  return NormalizedAdjacency(CsrMatrix(n, n, std::move(row_ptr), std::move(col_idx), std::move(values)));
}

NormalizedAdjacency normalize(const SparseAdjacency& adjacency) { return normalize(adjacency.matrix()); }

Matrix sp_dense_matmul(const NormalizedAdjacency& adj, const Matrix& h) { return spmm(adj.matrix(), h); }

Matrix sp_dense_matmul(const SparseAdjacency& adj, const Matrix& h) { return spmm(adj.matrix(), h); }

CsrMatrix with_self_loops(const SparseAdjacency& adj) {
  const auto& m = adj.matrix();
  const std::size_t n = m.rows();
  std::vector<std::size_t> row_ptr(n + 1, 0);
  std::vector<Index> col_idx;
  col_idx.reserve(m.nnz() + n);
  for (std::size_t r = 0; r < n; ++r) {
    bool self_done = false;
    for (Index c : m.row_cols(r)) {
      if (!self_done && c > r) {
        col_idx.push_back(static_cast<Index>(r));
        self_done = true;
      }
      col_idx.push_back(c);
    }
    if (!self_done) col_idx.push_back(static_cast<Index>(r));
    row_ptr[r + 1] = col_idx.size();
  }
  std::vector<double> ones(col_idx.size(), 1.0);
  return CsrMatrix(n, n, std::move(row_ptr), std::move(col_idx), std::move(ones));
}

CsrMatrix mean_operator(const SparseAdjacency& adj) {
  const auto& m = adj.matrix();
  std::vector<std::size_t> row_ptr(m.row_ptr().begin(), m.row_ptr().end());
  std::vector<Index> col_idx(m.col_idx().begin(), m.col_idx().end());
  std::vector<double> values(m.nnz());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const std::size_t deg = m.row_nnz(r);
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) values[k] = 1.0 / static_cast<double>(deg);
  }
  return CsrMatrix(m.rows(), m.cols(), std::move(row_ptr), std::move(col_idx), std::move(values));
}

CsrMatrix induced(const CsrMatrix& m, std::span<const Index> nodes) {
  if (m.rows() != m.cols()) throw ShapeError("induced: matrix is not square");
  std::vector<std::int64_t> local(m.rows(), -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] >= m.rows()) throw ValidationError("induced: node out of range");
    if (i > 0 && nodes[i] <= nodes[i - 1]) throw ValidationError("induced: node list must be ascending");
    local[nodes[i]] = static_cast<std::int64_t>(i);
  }
  const std::size_t k = nodes.size();
  std::vector<std::size_t> row_ptr(k + 1, 0);
  std::vector<Index> col_idx;
  std::vector<double> values;
  for (std::size_t i = 0; i < k; ++i) {
    auto cols = m.row_cols(nodes[i]);
    auto vals = m.row_values(nodes[i]);
    // The remap is monotone, so surviving columns stay sorted.
    for (std::size_t e = 0; e < cols.size(); ++e) {
      const auto l = local[cols[e]];
      if (l < 0) continue;
      col_idx.push_back(static_cast<Index>(l));
      values.push_back(vals[e]);
    }
    row_ptr[i + 1] = col_idx.size();
  }
  return CsrMatrix(k, k, std::move(row_ptr), std::move(col_idx), std::move(values));
}

}  // namespace rau::graph
