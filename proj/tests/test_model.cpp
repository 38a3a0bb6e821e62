#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "rau/autodiff/weights_io.hpp"
#include "rau/error.hpp"
#include "rau/eval/gradcheck.hpp"
#include "rau/graph/ops.hpp"
#include "rau/model/forward.hpp"
#include "rau/model/train.hpp"
#include "support.hpp"

using namespace rau;
using namespace rau::model;

namespace {

ModelConfig small_config(Variant v = Variant::kFull) {
  ModelConfig c;
  c.variant = v;
  c.gcn_layers = 2;
  c.gat_layers = 1;
  c.gat_heads = 2;
  c.embed_dim = 8;
  c.batch_size = 8;
  c.epochs = 3;
  c.seed = 5;
  return c;
}

std::vector<double> probabilities(const PreparedGraph& g, const ModelParams& p, const ModelConfig& c) {
  return predict(g.view(), p, c).probability;
}

}  // namespace

TEST(Config, ValidationAndParsing) {
  EXPECT_EQ(parse_variant("pa"), Variant::kPa);
  EXPECT_EQ(to_string(Variant::kPr), "pr");
  EXPECT_THROW(parse_variant("gat"), ValidationError);
  ModelConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.effective_hops(), 4u);
  c.embed_dim = 30;
  EXPECT_THROW(c.validate(), ValidationError);
  c = ModelConfig{};
  c.lr = -1;
  EXPECT_THROW(c.validate(), ValidationError);
  c = ModelConfig{};
  c.variant = Variant::kPr;
  c.gcn_layers = 0;
  EXPECT_NO_THROW(c.validate());
}

TEST(Params, LayoutShapes) {
  ModelConfig c = small_config();
  ModelParams p = ModelParams::initialize(c, 5, 3);
  const auto& t = p.tensors();
  EXPECT_EQ(t[p.gcn_weight(0, 0)].value.rows(), 5u);
  EXPECT_EQ(t[p.gcn_weight(2, 1)].value.rows(), 8u);
  EXPECT_EQ(t[p.gat_transform(0, 1)].value.rows(), 24u);  // three fused relations of width 8
  EXPECT_EQ(t[p.gat_transform(0, 1)].value.cols(), 4u);
  EXPECT_EQ(t[p.gat_attention(0, 0)].value.rows(), 8u);
  EXPECT_EQ(t[p.mlp_out_bias()].value, Matrix(1, 1));
  EXPECT_THROW(p.gcn_weight(3, 0), ValidationError);

  ModelParams pr = ModelParams::initialize(small_config(Variant::kPr), 5, 3);
  EXPECT_FALSE(pr.tensors().find("gcn.r0.l0.weight").has_value());
  EXPECT_EQ(pr.tensors()[pr.gat_transform(0, 0)].value.rows(), 5u);
}

TEST(Params, InitializationIsSeeded) {
  ModelConfig c = small_config();
  EXPECT_EQ(ModelParams::initialize(c, 5, 2), ModelParams::initialize(c, 5, 2));
  ModelConfig other = c;
  other.seed = 6;
  EXPECT_NE(ModelParams::initialize(c, 5, 2), ModelParams::initialize(other, 5, 2));
}

TEST(Params, AdoptChecksLayout) {
  ModelConfig c = small_config();
  ModelParams p = ModelParams::initialize(c, 5, 2);
  EXPECT_EQ(ModelParams::adopt(p.tensors(), c, 5, 2), p);
  EXPECT_THROW(ModelParams::adopt(p.tensors(), c, 6, 2), ValidationError);
  EXPECT_THROW(ModelParams::adopt(p.tensors(), c, 5, 3), ValidationError);
}

TEST(Forward, PrStageIsNormalizedSumOfPropagatedFeatures) {
  auto g = test::random_graph(10, 3, 4, 0.3, 31);
  PreparedGraph pg(g);
  ModelConfig c = small_config(Variant::kPr);
  ModelParams p = ModelParams::initialize(c, 4, 3);
  ad::Tape tape;
  BoundParams bound(p, p.tensors().bind_constant(tape));
  Matrix fused = relation_stage(pg.view(), bound, c, tape).value();

  Matrix total(10, 4);
  for (const auto& r : g.relations())
    total += test::naive_matmul(test::dense_normalize(r.adjacency.matrix().to_dense()), g.features());
  for (std::size_t i = 0; i < 10; ++i) {
    double norm = 0;
    for (double x : total.row(i)) norm += x * x;
    norm = std::sqrt(norm);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(fused(i, k), total(i, k) / norm, 1e-14);
  }
}

TEST(Forward, PaEmbeddingIsAttentionOutput) {
  auto g = test::random_graph(12, 2, 4, 0.3, 32);
  PreparedGraph pg(g);
  ModelConfig c = small_config(Variant::kPa);
  ModelParams p = ModelParams::initialize(c, 4, 2);
  ad::Tape tape;
  BoundParams bound(p, p.tensors().bind_constant(tape));
  ForwardResult f = forward(tape, pg.view(), bound, c);
  EXPECT_EQ(f.embedding.value(), f.attention.value());

  // the same weights under full add the aggregator on top
  ModelConfig full = c;
  full.variant = Variant::kFull;
  ad::Tape t2;
  ModelParams pf = ModelParams::adopt(p.tensors(), full, 4, 2);
  BoundParams b2(pf, pf.tensors().bind_constant(t2));
  ForwardResult ff = forward(t2, pg.view(), b2, full);
  EXPECT_EQ(ff.attention.value(), f.attention.value());
  EXPECT_NE(ff.embedding.value(), f.embedding.value());
}

TEST(Forward, RowsSelectProbabilities) {
  auto g = test::random_graph(9, 2, 3, 0.3, 33);
  PreparedGraph pg(g);
  ModelConfig c = small_config();
  ModelParams p = ModelParams::initialize(c, 3, 2);
  auto all = probabilities(pg, p, c);
  ad::Tape tape;
  BoundParams bound(p, p.tensors().bind_constant(tape));
  std::vector<Index> rows{7, 2, 7};
  ForwardResult f = forward(tape, pg.view(), bound, c, rows);
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(f.probability.value()(i, 0), all[rows[i]]);
  for (double x : all) {
    EXPECT_GT(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
}

TEST(Forward, PredictRejectsForeignVariant) {
  auto g = test::random_graph(6, 1, 3, 0.3, 34);
  PreparedGraph pg(g);
  ModelParams p = ModelParams::initialize(small_config(Variant::kPr), 3, 1);
  EXPECT_THROW(predict(pg.view(), p, small_config(Variant::kFull)), ValidationError);
}

class Equivariance : public ::testing::TestWithParam<Variant> {};

TEST_P(Equivariance, PermutedInputGivesPermutedOutput) {
  SplitMix64 rng(35);
  for (int trial = 0; trial < 5; ++trial) {
    auto g = test::random_graph(10, 2, 4, 0.3, 100 + trial);
    auto perm = test::random_permutation(10, rng);
    ModelConfig c = small_config(GetParam());
    ModelParams p = ModelParams::initialize(c, 4, 2);
    auto a = predict(PreparedGraph(g).view(), p, c);
    auto b = predict(PreparedGraph(test::permute_graph(g, perm)).view(), p, c);
    for (std::size_t i = 0; i < 10; ++i) {
      EXPECT_NEAR(b.probability[perm[i]], a.probability[i], 1e-10);
      for (std::size_t k = 0; k < a.embedding.cols(); ++k)
        EXPECT_NEAR(b.embedding(perm[i], k), a.embedding(i, k), 1e-10);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Variants, Equivariance, ::testing::Values(Variant::kFull, Variant::kPr, Variant::kPa));

TEST(Batch, LocalIndicesAreMonotoneAndBfsMatchesHand) {
  // path 0-1-2-3-4 in one relation, edge 4-5 in another
  std::vector<graph::Relation> rel{
      {"a", graph::SparseAdjacency::from_edges(6, std::vector<std::pair<Index, Index>>{{0, 1}, {1, 2}, {2, 3}, {3, 4}})},
      {"b", graph::SparseAdjacency::from_edges(6, std::vector<std::pair<Index, Index>>{{4, 5}})}};
  graph::MultiRelationGraph g(Matrix(6, 2, 1.0), rel, std::vector<graph::Label>(6, graph::Label::kBenign));
  PreparedGraph pg(g);
  std::vector<Index> seeds{5};
  EXPECT_EQ(sample_batch(pg, seeds, 1).included, (std::vector<Index>{4, 5}));
  auto b = sample_batch(pg, seeds, 3);
  EXPECT_EQ(b.included, (std::vector<Index>{2, 3, 4, 5}));
  EXPECT_EQ(b.seed_local, (std::vector<Index>{3}));
  EXPECT_EQ(b.local_index(2), std::optional<Index>(0));
  EXPECT_FALSE(b.local_index(1).has_value());
  EXPECT_THROW(sample_batch(pg, std::vector<Index>{}, 2), ValidationError);
  EXPECT_THROW(sample_batch(pg, seeds, 0), ValidationError);
}

TEST(Batch, NeighbourCapLimitsExpansion) {
  std::vector<std::pair<Index, Index>> star;
  for (Index i = 1; i < 20; ++i) star.emplace_back(0, i);
  std::vector<graph::Relation> rel{{"a", graph::SparseAdjacency::from_edges(20, star)}};
  graph::MultiRelationGraph g(Matrix(20, 2, 1.0), rel, std::vector<graph::Label>(20, graph::Label::kBenign));
  PreparedGraph pg(g);
  std::vector<Index> seeds{0};
  auto b = sample_batch(pg, seeds, 1, {.max_neighbors = 4, .seed = 1});
  EXPECT_EQ(b.included.size(), 5u);
  EXPECT_EQ(sample_batch(pg, seeds, 1, {.max_neighbors = 4, .seed = 1}).included, b.included);
}

class BatchConsistency : public ::testing::TestWithParam<Variant> {};

TEST_P(BatchConsistency, CoveringHopsReproduceFullGraphOutputs) {
  SplitMix64 rng(36);
  for (int trial = 0; trial < 5; ++trial) {
    auto g = test::random_graph(80, 2, 4, 0.012, 200 + trial);
    PreparedGraph pg(g);
    ModelConfig c = small_config(GetParam());
    ModelParams p = ModelParams::initialize(c, 4, 2);
    auto full = probabilities(pg, p, c);

    std::vector<Index> seeds;
    for (int k = 0; k < 5; ++k) seeds.push_back(static_cast<Index>(rng.below(80)));
    auto batch = sample_batch(pg, seeds, c.effective_hops());
    ad::Tape tape;
    BoundParams bound(p, p.tensors().bind_constant(tape));
    auto f = forward(tape, batch.view, bound, c, batch.seed_local);
    for (std::size_t i = 0; i < seeds.size(); ++i) EXPECT_NEAR(f.probability.value()(i, 0), full[seeds[i]], 1e-10);
  }
}

INSTANTIATE_TEST_SUITE_P(Variants, BatchConsistency, ::testing::Values(Variant::kFull, Variant::kPr, Variant::kPa));

TEST(Split, StratifiedCountsAndDisjoint) {
  std::vector<graph::Label> labels;
  for (int i = 0; i < 100; ++i) labels.push_back(i < 23 ? graph::Label::kAnomalous : graph::Label::kBenign);
  labels[50] = graph::Label::kUnlabeled;
  graph::MultiRelationGraph g(Matrix(100, 1), {{"a", graph::SparseAdjacency::zeros(100)}}, labels);
  Split s = stratified_split(g, 20, 3);
  std::size_t pos = 0;
  for (Index v : s.train) pos += labels[v] == graph::Label::kAnomalous;
  EXPECT_EQ(pos, 4u);                       // floor(23 * 0.2)
  EXPECT_EQ(s.train.size(), 4u + 15u);      // floor(76 * 0.2)
  EXPECT_EQ(s.train.size() + s.test.size(), 99u);
  EXPECT_TRUE(std::is_sorted(s.train.begin(), s.train.end()));
  std::set<Index> all(s.train.begin(), s.train.end());
  for (Index v : s.test) EXPECT_TRUE(all.insert(v).second);
  EXPECT_FALSE(all.contains(50));
  EXPECT_EQ(stratified_split(g, 20, 3).train, s.train);
  EXPECT_NE(stratified_split(g, 20, 4).train, s.train);
  EXPECT_THROW(stratified_split(g, 0, 3), ValidationError);
  EXPECT_THROW(stratified_split(g, 100, 3), ValidationError);
}

TEST(Split, TinyClassesKeepOneOnEachSide) {
  std::vector<graph::Label> labels{graph::Label::kAnomalous, graph::Label::kAnomalous, graph::Label::kBenign,
                                   graph::Label::kBenign, graph::Label::kBenign};
  graph::MultiRelationGraph g(Matrix(5, 1), {{"a", graph::SparseAdjacency::zeros(5)}}, labels);
  Split s = stratified_split(g, 99, 0);
  EXPECT_EQ(s.train.size(), 1u + 2u);
  EXPECT_EQ(s.test.size(), 2u);
}

TEST(BalancedBatches, AlternatesAndVisitsMajorityOnce) {
  std::vector<Index> pos{0, 1, 2}, neg;
  for (Index i = 10; i < 27; ++i) neg.push_back(i);
  SplitMix64 rng(37);
  auto batches = balanced_batches(pos, neg, 6, rng);
  std::vector<Index> flat;
  for (const auto& b : batches) {
    EXPECT_LE(b.size(), 6u);
    flat.insert(flat.end(), b.begin(), b.end());
  }
  ASSERT_EQ(flat.size(), 34u);
  std::multiset<Index> seen_neg;
  std::map<Index, int> pos_count;
  for (std::size_t i = 0; i < flat.size(); i += 2) {
    EXPECT_LT(flat[i], 10u);
    EXPECT_GE(flat[i + 1], 10u);
    ++pos_count[flat[i]];
    seen_neg.insert(flat[i + 1]);
  }
  EXPECT_EQ(seen_neg, std::multiset<Index>(neg.begin(), neg.end()));
  for (auto [v, k] : pos_count) EXPECT_TRUE(k == 5 || k == 6) << v;
}

TEST(Train, LossDecreasesAndIsDeterministic) {
  auto g = test::random_graph(30, 2, 4, 0.15, 38);
  PreparedGraph pg(g);
  ModelConfig c = small_config();
  c.epochs = 15;
  c.lr = 0.01;
  auto nodes = g.labeled_nodes();
  TrainResult a = train(pg, nodes, c);
  TrainResult b = train(pg, nodes, c);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.losses, b.losses);
  // 20 benign seeds each paired with an anomalous one: 40 seeds, 5 batches of 8
  ASSERT_EQ(a.losses.size(), 15u * 5u);
  double head = 0, tail = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    head += a.losses[i];
    tail += a.losses[a.losses.size() - 1 - i];
  }
  EXPECT_LT(tail, head);
}

TEST(Train, ZeroLearningRateKeepsWeights) {
  auto g = test::random_graph(20, 2, 4, 0.2, 39);
  PreparedGraph pg(g);
  ModelConfig c = small_config();
  c.lr = 0.0;
  ModelParams init = ModelParams::initialize(c, 4, 2);
  TrainResult r = train(pg, g.labeled_nodes(), c);
  EXPECT_EQ(r.params, init);
  for (double l : r.losses) EXPECT_GE(l, 0.0);
}

TEST(Train, RejectsSingleClass) {
  auto g = test::random_graph(12, 1, 3, 0.3, 40);
  PreparedGraph pg(g);
  std::vector<Index> benign_only{1, 2, 4};
  EXPECT_THROW(train(pg, benign_only, small_config()), ValidationError);
}

TEST(Train, PatienceStopsEarly) {
  auto g = test::random_graph(20, 2, 4, 0.2, 41);
  PreparedGraph pg(g);
  ModelConfig c = small_config();
  c.lr = 0.0;  // flat loss, so every epoch after the first is stale
  c.epochs = 50;
  c.patience = 2;
  std::size_t calls = 0;
  TrainResult r = train(pg, g.labeled_nodes(), c, [&](std::size_t, const ModelParams&) { ++calls; });
  EXPECT_LT(r.epochs_run, 50u);
  EXPECT_EQ(calls, r.epochs_run);
}

TEST(Checkpoint, RoundTrip) {
  auto g = test::random_graph(12, 2, 4, 0.3, 42);
  PreparedGraph pg(g);
  ModelConfig c = small_config(Variant::kPa);
  TrainResult r = train(pg, g.labeled_nodes(), c);
  CheckpointMeta meta{c, 4, 2, {"r0", "r1"}, 20.0, r.epochs_run};
  test::TempDir dir("ckpt");
  save_checkpoint(dir.path, r.params, meta, r.losses);
  Checkpoint back = load_checkpoint(dir.path);
  EXPECT_EQ(back.params, r.params);
  EXPECT_EQ(back.meta.relation_names, meta.relation_names);
  EXPECT_EQ(back.meta.config.variant, Variant::kPa);
  EXPECT_EQ(back.meta.config.seed, c.seed);
  EXPECT_DOUBLE_EQ(back.meta.config.lr, c.lr);
  EXPECT_TRUE(std::filesystem::exists(dir.path / "loss_trajectory.csv"));
  EXPECT_EQ(config_to_json(config_from_json(config_to_json(meta))), config_to_json(meta));
  EXPECT_THROW(config_from_json("{\"format\": \"other\"}"), ValidationError);
  EXPECT_THROW(config_from_json("not json"), ValidationError);
}

TEST(ModelGradcheck, SmallStackPasses) {
  auto g = eval::gradcheck_graph(3, 8, 2, 3);
  auto result = eval::model_gradcheck(g, eval::gradcheck_config());
  EXPECT_TRUE(result.passed) << result.worst_parameter << " " << result.max_relative_error;
  EXPECT_GT(result.checked, 100u);
}
