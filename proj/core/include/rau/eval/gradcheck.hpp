#pragma once

#include <cstdint>

#include "rau/autodiff/gradcheck.hpp"
#include "rau/graph/types.hpp"
#include "rau/model/config.hpp"

namespace rau::eval {

/// Model used by the end-to-end gradient check: 2 GCN layers per relation,
/// one 2-head attention layer, the aggregator and the classifier.
model::ModelConfig gradcheck_config();

/// Random 12-node graph with two weighted relations and both classes labeled.
graph::MultiRelationGraph gradcheck_graph(std::uint64_t seed, std::size_t n = 12, std::size_t relations = 2,
                                          std::size_t feature_dim = 5);

/// Finite-difference check of every model parameter on `g`, with the
/// detection loss over all labeled nodes.
ad::GradCheckResult model_gradcheck(const graph::MultiRelationGraph& g, const model::ModelConfig& config,
                                    const ad::GradCheckOptions& options = {});

}  // namespace rau::eval
