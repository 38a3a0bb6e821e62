#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rau/autodiff/ops.hpp"
#include "rau/autodiff/tape.hpp"
#include "rau/csr.hpp"

namespace rau::layers {

using ad::Tape;
using ad::Var;

inline constexpr double kAttentionSlope = 0.2;
inline constexpr double kFusionEpsilon = 1e-12;

/// One GCN propagation step: relu(A_hat * H * W).
Var gcn_forward(const CsrMatrix& normalized_adjacency, Var h, Var weight);

/// Column-wise concatenation of the per-relation outputs in the given order,
/// then row-wise L2 normalisation.
Var fuse_relations(std::span<const Var> per_relation, double eps = kFusionEpsilon);

struct GatHead {
  Var transform;  // d_in x d_head
  Var attention;  // 2*d_head x 1; first half scores the centre node, second half the neighbour
};

struct GatOutput {
  Var output;                  // n x (heads * d_head), after ReLU
  std::vector<Var> attention;  // per head, nnz(pattern) x 1 coefficients
};

/// Multi-head graph attention over the structure of `pattern` (A + I).
/// Per head: e_ij = leaky_relu(a^T [T h_i || T h_j]), alpha = row softmax over
/// the stored neighbours, out_i = sum_j alpha_ij T h_j. Heads are concatenated
/// and passed through ReLU.
GatOutput gat_forward(const CsrMatrix& pattern, Var h, std::span<const GatHead> heads,
                      double slope = kAttentionSlope);

/// relu(Z0_v + mean_{j in N(v)} Z0_j), with `mean_op` from graph::mean_operator.
Var enhanced_aggregate(const CsrMatrix& mean_op, Var z0);

struct ClassifierVars {
  Var hidden_weight;  // d x d
  Var hidden_bias;    // 1 x d
  Var out_weight;     // d x 1
  Var out_bias;       // 1 x 1
};

/// sigmoid(MLP(z)) with one ReLU hidden layer; returns m x 1 probabilities.
Var discriminate(Var z, const ClassifierVars& mlp);

/// Mean binary cross-entropy over the batch plus lambda * sum of squared
/// entries of every tensor in `regularized`.
Var detection_loss(Var probabilities, std::span<const double> labels, std::span<const Var> regularized,
                   double lambda);

}  // namespace rau::layers
