#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rau/graph/ops.hpp"
#include "rau/graph/types.hpp"
#include "rau/matrix.hpp"
#include "rau/random.hpp"

namespace rau::test {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, SplitMix64& rng, double lo = -1.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (double& x : m.values()) x = rng.uniform(lo, hi);
  return m;
}

inline graph::IncidenceMatrix random_incidence(std::size_t users, std::size_t entities, double p, SplitMix64& rng) {
  graph::IncidenceMatrix w;
  w.n_users = users;
  w.n_entities = entities;
  for (std::size_t u = 0; u < users; ++u)
    for (std::size_t e = 0; e < entities; ++e)
      if (rng.bernoulli(p)) w.entries.emplace_back(static_cast<Index>(u), static_cast<Index>(e));
  return w;
}

/// Symmetric random graph with integer weights in [1, max_weight].
inline graph::SparseAdjacency random_adjacency(std::size_t n, double p, SplitMix64& rng, int max_weight = 3) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.bernoulli(p)) {
        const double w = 1.0 + static_cast<double>(rng.below(static_cast<std::uint64_t>(max_weight)));
        t.push_back({static_cast<Index>(i), static_cast<Index>(j), w});
        t.push_back({static_cast<Index>(j), static_cast<Index>(i), w});
      }
  return graph::SparseAdjacency(CsrMatrix::from_triplets(n, n, std::move(t)));
}

inline graph::MultiRelationGraph random_graph(std::size_t n, std::size_t relations, std::size_t d, double p,
                                              std::uint64_t seed) {
  SplitMix64 rng(seed);
  Matrix x = random_matrix(n, d, rng);
  std::vector<graph::Relation> rel;
  for (std::size_t r = 0; r < relations; ++r) rel.push_back({"r" + std::to_string(r), random_adjacency(n, p, rng)});
  std::vector<graph::Label> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = i % 3 == 0 ? graph::Label::kAnomalous : graph::Label::kBenign;
  return graph::MultiRelationGraph(std::move(x), std::move(rel), std::move(labels));
}

/// Relabels node i as perm[i] in features, labels and every relation.
inline graph::MultiRelationGraph permute_graph(const graph::MultiRelationGraph& g, const std::vector<Index>& perm) {
  const std::size_t n = g.n();
  Matrix x(n, g.feature_dim());
  std::vector<graph::Label> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < g.feature_dim(); ++c) x(perm[i], c) = g.features()(i, c);
    labels[perm[i]] = g.labels()[i];
  }
  std::vector<graph::Relation> rel;
  for (const auto& r : g.relations()) {
    const CsrMatrix& m = r.adjacency.matrix();
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t p = m.row_ptr()[i]; p < m.row_ptr()[i + 1]; ++p)
        t.push_back({perm[i], perm[m.col_idx()[p]], m.values()[p]});
    rel.push_back({r.name, graph::SparseAdjacency(CsrMatrix::from_triplets(n, n, std::move(t)))});
  }
  return graph::MultiRelationGraph(std::move(x), std::move(rel), std::move(labels));
}

inline std::vector<Index> random_permutation(std::size_t n, SplitMix64& rng) {
  std::vector<Index> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<Index>(i);
  shuffle(std::span<Index>(perm), rng);
  return perm;
}

inline Matrix naive_matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      long double s = 0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += static_cast<long double>(a(i, k)) * b(k, j);
      c(i, j) = static_cast<double>(s);
    }
  return c;
}

/// Dense D^-1/2 (A + I) D^-1/2.
inline Matrix dense_normalize(const Matrix& a) {
  const std::size_t n = a.rows();
  Matrix s = a;
  for (std::size_t i = 0; i < n; ++i) s(i, i) += 1.0;
  std::vector<double> deg(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) deg[i] += s(i, j);
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = s(i, j) / std::sqrt(deg[i] * deg[j]);
  return out;
}

inline Matrix relu(Matrix m) {
  for (double& x : m.values()) x = x > 0 ? x : 0.0;
  return m;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    SplitMix64 rng(static_cast<std::uint64_t>(std::hash<std::string>{}(tag)) ^
                   static_cast<std::uint64_t>(reinterpret_cast<std::uintptr_t>(this)));
    path = std::filesystem::temp_directory_path() / ("rau_" + tag + "_" + std::to_string(rng() % 1000000007ULL));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace rau::test
