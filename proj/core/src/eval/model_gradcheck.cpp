#include "rau/eval/gradcheck.hpp"

#include "rau/error.hpp"
#include "rau/layers/layers.hpp"
#include "rau/model/forward.hpp"
#include "rau/model/graph_view.hpp"
#include "rau/model/params.hpp"
#include "rau/random.hpp"

namespace rau::eval {

model::ModelConfig gradcheck_config() {
  model::ModelConfig c;
  c.gcn_layers = 2;
  c.gat_layers = 1;
  c.gat_heads = 2;
  c.embed_dim = 8;
  c.lambda = 0.001;
  c.seed = 7;
  return c;
}

graph::MultiRelationGraph gradcheck_graph(std::uint64_t seed, std::size_t n, std::size_t relations,
                                          std::size_t feature_dim) {
  if (n < 2) throw ValidationError("gradcheck graph needs at least two nodes");
  SplitMix64 rng(derive_seed(seed, "gradcheck-graph"));
  Matrix x(n, feature_dim);
  for (double& v : x.values()) v = rng.uniform(-2.0, 2.0);
  std::vector<graph::Relation> rels;
  for (std::size_t r = 0; r < relations; ++r) {
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!rng.bernoulli(0.3)) continue;
        const double w = static_cast<double>(1 + rng.below(3));
        t.push_back({static_cast<Index>(i), static_cast<Index>(j), w});
        t.push_back({static_cast<Index>(j), static_cast<Index>(i), w});
      }
    }
    rels.push_back({"r" + std::to_string(r), graph::SparseAdjacency(CsrMatrix::from_triplets(n, n, std::move(t)))});
  }
  std::vector<graph::Label> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = i % 2 == 0 ? graph::Label::kBenign : graph::Label::kAnomalous;
  return graph::MultiRelationGraph(std::move(x), std::move(rels), std::move(labels));
}

ad::GradCheckResult model_gradcheck(const graph::MultiRelationGraph& g, const model::ModelConfig& config,
                                    const ad::GradCheckOptions& options) {
  const model::PreparedGraph prepared(g);
  model::ModelParams params = model::ModelParams::initialize(config, g.feature_dim(), g.relation_count());
  const std::vector<Index> rows = g.labeled_nodes();
  std::vector<double> labels;
  for (Index v : rows) labels.push_back(graph::label_value(g.labels()[v]));

  // check_gradients perturbs params.tensors() in place; BoundParams only reads the layout
  auto build = [&](ad::Tape& tape, std::span<const ad::Var> vars) {
    model::BoundParams bound(params, std::vector<ad::Var>(vars.begin(), vars.end()));
    auto f = model::forward(tape, prepared.view(), bound, config, rows);
    return layers::detection_loss(f.probability, labels, bound.all(), config.lambda);
  };
  return ad::check_gradients(params.tensors(), build, options);
}

}  // namespace rau::eval
