#include "rau/layers/layers.hpp"

#include <string>

#include "rau/error.hpp"

namespace rau::layers {

Var gcn_forward(const CsrMatrix& normalized_adjacency, Var h, Var weight) {
  if (normalized_adjacency.cols() != h.rows())
    throw ShapeError("gcn_forward: adjacency has " + std::to_string(normalized_adjacency.cols()) +
                     " nodes, features have " + std::to_string(h.rows()) + " rows");
  // (A H) W and A (H W) are equal; propagate whichever side is narrower.
  if (weight.cols() < h.cols()) return ad::relu(ad::spmm(normalized_adjacency, ad::matmul(h, weight)));
  return ad::relu(ad::matmul(ad::spmm(normalized_adjacency, h), weight));
}

Var fuse_relations(std::span<const Var> per_relation, double eps) {
  if (per_relation.empty()) throw ShapeError("fuse_relations: no relation outputs");
  for (const Var& v : per_relation)
    if (v.rows() != per_relation.front().rows() || v.cols() != per_relation.front().cols())
      throw ShapeError("fuse_relations: relation outputs differ in shape");
  if (per_relation.size() == 1) return ad::row_l2_normalize(per_relation.front(), eps);
  return ad::row_l2_normalize(ad::concat_cols(per_relation), eps);
}

GatOutput gat_forward(const CsrMatrix& pattern, Var h, std::span<const GatHead> heads, double slope) {
  if (heads.empty()) throw ShapeError("gat_forward: at least one head is required");
  if (pattern.rows() != h.rows() || pattern.cols() != h.rows())
    throw ShapeError("gat_forward: pattern does not match feature rows");
  GatOutput out;
  std::vector<Var> head_outputs;
  for (const GatHead& head : heads) {
    if (head.transform.rows() != h.cols()) throw ShapeError("gat_forward: transform input dimension mismatch");
    const std::size_t d_head = head.transform.cols();
    if (head.attention.rows() != 2 * d_head || head.attention.cols() != 1)
      throw ShapeError("gat_forward: attention vector must be 2*d_head x 1");
    Var projected = ad::matmul(h, head.transform);
    Var src_score = ad::matmul(projected, ad::slice_rows(head.attention, 0, d_head));
    Var dst_score = ad::matmul(projected, ad::slice_rows(head.attention, d_head, d_head));
    Var alpha = ad::edge_softmax(pattern, src_score, dst_score, slope);
    head_outputs.push_back(ad::spmm_edge(pattern, alpha, projected));
    out.attention.push_back(alpha);
  }
  Var joined = head_outputs.size() == 1 ? head_outputs.front() : ad::concat_cols(head_outputs);
  out.output = ad::relu(joined);
  return out;
}

Var enhanced_aggregate(const CsrMatrix& mean_op, Var z0) {
  if (mean_op.rows() != z0.rows() || mean_op.cols() != z0.rows())
    throw ShapeError("enhanced_aggregate: operator does not match embedding rows");
  return ad::relu(ad::add(z0, ad::spmm(mean_op, z0)));
}

Var discriminate(Var z, const ClassifierVars& mlp) {
  Var hidden = ad::relu(ad::add_row(ad::matmul(z, mlp.hidden_weight), mlp.hidden_bias));
  return ad::sigmoid(ad::add_row(ad::matmul(hidden, mlp.out_weight), mlp.out_bias));
}

Var detection_loss(Var probabilities, std::span<const double> labels, std::span<const Var> regularized,
                   double lambda) {
  if (lambda < 0.0) throw ValidationError("detection_loss: lambda must be >= 0");
  Var loss = ad::binary_cross_entropy(probabilities, labels);
  if (lambda == 0.0 || regularized.empty()) return loss;
  Var penalty = ad::sum_squares(regularized.front());
  for (std::size_t i = 1; i < regularized.size(); ++i) penalty = ad::add(penalty, ad::sum_squares(regularized[i]));
  return ad::add(loss, ad::scale(penalty, lambda));
}

}  // namespace rau::layers
