#pragma once

#include <span>
#include <vector>

#include "rau/autodiff/tape.hpp"
#include "rau/model/config.hpp"
#include "rau/model/graph_view.hpp"
#include "rau/model/params.hpp"

namespace rau::model {

struct ForwardResult {
  ad::Var fused;        // input to the attention layer, n x (R d') for full/pa, n x d for pr
  ad::Var attention;    // attention-stage output, n x d'
  std::vector<std::vector<ad::Var>> coefficients;  // [layer][head] -> nnz x 1
  ad::Var embedding;    // final embedding Z, n x d'
  ad::Var probability;  // m x 1 for the requested rows
};

/// Relation stage: per-relation GCN stacks + concat fusion (full, pa), or the
/// summed one-hop propagation of raw features (pr). Both end L2-normalized.
ad::Var relation_stage(const GraphView& view, const BoundParams& bound, const ModelConfig& config,
                       ad::Tape& tape);

/// Everything after the relation stage: attention layers, the enhanced
/// aggregator (skipped for pa), and the discriminator on `rows` (all rows when empty).
ForwardResult attention_onward(const GraphView& view, const BoundParams& bound, const ModelConfig& config,
                               ad::Var fused, std::span<const Index> rows = {});

/// Runs the variant selected by config.variant.
ForwardResult forward(ad::Tape& tape, const GraphView& view, const BoundParams& bound, const ModelConfig& config,
                      std::span<const Index> rows = {});

ForwardResult forward_full(ad::Tape& tape, const GraphView& view, const BoundParams& bound, ModelConfig config,
                           std::span<const Index> rows = {});
ForwardResult forward_pr(ad::Tape& tape, const GraphView& view, const BoundParams& bound, ModelConfig config,
                         std::span<const Index> rows = {});
ForwardResult forward_pa(ad::Tape& tape, const GraphView& view, const BoundParams& bound, ModelConfig config,
                         std::span<const Index> rows = {});

struct Prediction {
  Matrix embedding;                 // n x d'
  std::vector<double> probability;  // per node
};

/// Gradient-free forward pass over every node of the view.
Prediction predict(const GraphView& view, const ModelParams& params, const ModelConfig& config);

}  // namespace rau::model
