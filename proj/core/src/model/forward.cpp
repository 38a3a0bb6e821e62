#include "rau/model/forward.hpp"

#include "rau/autodiff/ops.hpp"
#include "rau/error.hpp"
#include "rau/layers/layers.hpp"

namespace rau::model {

ad::Var relation_stage(const GraphView& view, const BoundParams& bound, const ModelConfig& config,
                       ad::Tape& tape) {
  const std::size_t n_rel = view.propagation.size();
  if (n_rel == 0) throw ValidationError("forward: graph has no relations");
  ad::Var x = tape.constant(view.features);

  if (config.variant == Variant::kPr) {
    // Raw features propagated once per relation, summed, then row-normalized.
    ad::Var total = ad::spmm(view.propagation[0], x);
    for (std::size_t r = 1; r < n_rel; ++r) total = ad::add(total, ad::spmm(view.propagation[r], x));
    return ad::row_l2_normalize(total, layers::kFusionEpsilon);
  }

  std::vector<ad::Var> per_relation;
  per_relation.reserve(n_rel);
  for (std::size_t r = 0; r < n_rel; ++r) {
    ad::Var h = x;
    for (std::size_t l = 0; l < config.gcn_layers; ++l)
      h = layers::gcn_forward(view.propagation[r], h, bound.gcn_weight(r, l));
    per_relation.push_back(h);
  }
  return layers::fuse_relations(per_relation);
}

ForwardResult attention_onward(const GraphView& view, const BoundParams& bound, const ModelConfig& config,
                               ad::Var fused, std::span<const Index> rows) {
  ForwardResult out;
  out.fused = fused;
  ad::Var h = fused;
  for (std::size_t l = 0; l < config.gat_layers; ++l) {
    auto heads = bound.gat_heads(l, config.gat_heads);
    auto gat = layers::gat_forward(view.attention_pattern, h, heads);
    h = gat.output;
    out.coefficients.push_back(std::move(gat.attention));
  }
  out.attention = h;
  out.embedding = config.variant == Variant::kPa ? h : layers::enhanced_aggregate(view.mean_op, h);
  ad::Var scored = rows.empty() ? out.embedding : ad::gather_rows(out.embedding, rows);
  out.probability = layers::discriminate(scored, bound.classifier());
  return out;
}

ForwardResult forward(ad::Tape& tape, const GraphView& view, const BoundParams& bound, const ModelConfig& config,
                      std::span<const Index> rows) {
  if (view.features.rows() == 0) throw ValidationError("forward: empty graph");
  ad::Var fused = relation_stage(view, bound, config, tape);
  return attention_onward(view, bound, config, fused, rows);
}

ForwardResult forward_full(ad::Tape& tape, const GraphView& view, const BoundParams& bound, ModelConfig config,
                           std::span<const Index> rows) {
  config.variant = Variant::kFull;
  return forward(tape, view, bound, config, rows);
}

ForwardResult forward_pr(ad::Tape& tape, const GraphView& view, const BoundParams& bound, ModelConfig config,
                         std::span<const Index> rows) {
  config.variant = Variant::kPr;
  return forward(tape, view, bound, config, rows);
}

ForwardResult forward_pa(ad::Tape& tape, const GraphView& view, const BoundParams& bound, ModelConfig config,
                         std::span<const Index> rows) {
  config.variant = Variant::kPa;
  return forward(tape, view, bound, config, rows);
}

Prediction predict(const GraphView& view, const ModelParams& params, const ModelConfig& config) {
  if (params.variant() != config.variant) throw ValidationError("predict: parameters belong to another variant");
  ad::Tape tape;
  BoundParams bound(params, params.tensors().bind_constant(tape));
  ForwardResult f = forward(tape, view, bound, config);
  Prediction p;
  p.embedding = f.embedding.value();
  const Matrix& prob = f.probability.value();
  p.probability.assign(prob.values().begin(), prob.values().end());
  return p;
}

}  // namespace rau::model
