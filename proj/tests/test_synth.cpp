#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "rau/error.hpp"
#include "rau/graph/ops.hpp"
#include "rau/synth/generator.hpp"
#include "support.hpp"

using namespace rau;
using namespace rau::synth;

namespace {

SynthConfig small(std::uint64_t seed = 1) {
  SynthConfig c;
  c.n_users = 400;
  c.seed = seed;
  return c;
}

std::size_t cross_edges(const graph::MultiRelationGraph& g, std::size_t r) {
  const CsrMatrix& m = g.relation(r).matrix();
  std::size_t k = 0;
  for (std::size_t i = 0; i < g.n(); ++i)
    for (Index j : m.row_cols(i)) k += g.labels()[i] != g.labels()[j];
  return k / 2;
}

// Logistic regression on features only, plain gradient descent; returns
// balanced accuracy on the second half of the nodes.
double feature_only_balanced_accuracy(const graph::MultiRelationGraph& g) {
  const std::size_t n = g.n(), d = g.feature_dim(), half = n / 2;
  std::vector<double> w(d + 1, 0.0);
  auto logit = [&](std::size_t i) {
    double s = w[d];
    for (std::size_t k = 0; k < d; ++k) s += w[k] * g.features()(i, k);
    return s;
  };
  // class-weighted so that a constant predictor cannot look good
  const double pos = static_cast<double>(g.count_label(graph::Label::kAnomalous));
  const double wpos = static_cast<double>(n) / (2 * pos), wneg = static_cast<double>(n) / (2 * (n - pos));
  for (int it = 0; it < 300; ++it) {
    std::vector<double> grad(d + 1, 0.0);
    for (std::size_t i = 0; i < half; ++i) {
      const double y = graph::label_value(g.labels()[i]);
      const double e = (1 / (1 + std::exp(-logit(i))) - y) * (y > 0 ? wpos : wneg);
      for (std::size_t k = 0; k < d; ++k) grad[k] += e * g.features()(i, k);
      grad[d] += e;
    }
    for (std::size_t k = 0; k <= d; ++k) w[k] -= 0.5 * grad[k] / static_cast<double>(half);
  }
  double tp = 0, p = 0, tn = 0, q = 0;
  for (std::size_t i = half; i < n; ++i) {
    const bool y = g.labels()[i] == graph::Label::kAnomalous, hat = logit(i) >= 0;
    if (y) {
      ++p;
      tp += hat;
    } else {
      ++q;
      tn += !hat;
    }
  }
  return 0.5 * (tp / p + tn / q);
}

}  // namespace

TEST(Synth, ExactCountsAndNames) {
  SynthConfig c = small();
  auto g = generate(c);
  EXPECT_EQ(g.n(), 400u);
  EXPECT_EQ(g.feature_dim(), 16u);
  EXPECT_EQ(g.count_label(graph::Label::kAnomalous), 80u);
  EXPECT_EQ(g.count_label(graph::Label::kBenign), 320u);
  ASSERT_EQ(g.relation_count(), 3u);
  EXPECT_EQ(g.relations()[0].name, "f");
  EXPECT_EQ(g.relations()[2].name, "p");
  EXPECT_EQ(relation_name(3), "h");
  EXPECT_EQ(relation_name(5), "r5");

  c.anomaly_fraction = 0.151;
  c.n_users = 1000;
  EXPECT_EQ(generate(c).count_label(graph::Label::kAnomalous), 151u);
}

TEST(Synth, CamouflageProfileAcrossRelations) {
  SynthConfig c;
  EXPECT_NEAR(c.relation_camouflage(0), 0.1, 1e-15);
  EXPECT_NEAR(c.relation_camouflage(1), 0.5, 1e-15);
  EXPECT_NEAR(c.relation_camouflage(2), 0.9, 1e-15);
  c.camouflage_rate = 0.9;
  EXPECT_EQ(c.relation_camouflage(2), 1.0);
  EXPECT_NEAR(c.relation_camouflage(0), 0.18, 1e-15);
  c.camouflage_rate = 0.0;
  for (std::size_t r = 0; r < 3; ++r) EXPECT_EQ(c.relation_camouflage(r), 0.0);
  c.camouflage_rate = 0.9;
  c.n_relations = 1;
  EXPECT_EQ(c.relation_camouflage(0), 0.9);
}

TEST(Synth, NoCamouflageMeansNoCrossClassEdges) {
  SynthConfig c = small(2);
  c.camouflage_rate = 0.0;
  auto g = generate(c);
  for (std::size_t r = 0; r < g.relation_count(); ++r) {
    EXPECT_EQ(cross_edges(g, r), 0u);
    // campaigns still tie every anomalous user to its group
    for (std::size_t i = 0; i < g.n(); ++i) {
      if (g.labels()[i] == graph::Label::kAnomalous) {
        EXPECT_GT(g.relation(r).matrix().row_nnz(i), 0u);
      }
    }
  }
}

TEST(Synth, IncidencesAreValidAndUnderDegreeCap) {
  auto data = generate_dataset(SynthConfig{});
  for (const auto& rel : data.relations) {
    EXPECT_NO_THROW(rel.incidence.validate());
    graph::RelationBuildReport report;
    graph::build_relation_graph(rel.incidence, {}, &report);
    EXPECT_TRUE(report.dropped_entities.empty()) << rel.name;
  }
}

TEST(Synth, CamouflageAddsCrossEdgesMonotonically) {
  SynthConfig c = small(3);
  auto g = generate(c);
  EXPECT_LT(cross_edges(g, 0), cross_edges(g, 1));
  EXPECT_LT(cross_edges(g, 1), cross_edges(g, 2));
}

TEST(Synth, ZeroShiftFeaturesCarryNoSignal) {
  SynthConfig c;
  c.n_users = 2000;
  c.camouflage_rate = 0.9;
  c.feature_shift = 0.0;
  c.seed = 4;
  EXPECT_NEAR(feature_only_balanced_accuracy(generate(c)), 0.5, 0.05);

  c.feature_shift = 1.0;
  EXPECT_GT(feature_only_balanced_accuracy(generate(c)), 0.9);
}

TEST(Synth, FeaturesFollowShiftedGaussian) {
  SynthConfig c;
  c.feature_shift = 0.7;
  c.seed = 5;
  auto g = generate(c);
  double sa = 0, sb = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < g.n(); ++i)
    for (double x : g.features().row(i)) {
      if (g.labels()[i] == graph::Label::kAnomalous) {
        sa += x;
        ++na;
      } else {
        sb += x;
        ++nb;
      }
    }
  EXPECT_NEAR(sa / na, 0.7, 0.03);
  EXPECT_NEAR(sb / nb, 0.0, 0.02);
}

TEST(Synth, SameSeedIsByteIdentical) {
  test::TempDir a("synth_a"), b("synth_b"), other("synth_c");
  write_dataset(a.path, generate_dataset(small(9)));
  write_dataset(b.path, generate_dataset(small(9)));
  write_dataset(other.path, generate_dataset(small(10)));
  for (const char* f : {"features.csv", "labels.csv", "incidence_f.csv", "incidence_c.csv", "incidence_p.csv"}) {
    EXPECT_EQ(test::read_file(a.path / f), test::read_file(b.path / f)) << f;
    EXPECT_FALSE(test::read_file(a.path / f).empty());
  }
  EXPECT_NE(test::read_file(a.path / "incidence_f.csv"), test::read_file(other.path / "incidence_f.csv"));
}

TEST(Synth, WrittenDatasetLoadsBackToSameGraph) {
  test::TempDir dir("synth_rt");
  auto data = generate_dataset(small(11));
  write_dataset(dir.path, data);
  auto loaded = graph::load_dataset_dir(dir.path);
  auto built = build_graph(data);
  EXPECT_EQ(loaded.features(), built.features());
  EXPECT_EQ(loaded.labels(), built.labels());
  // directories list relations by name
  ASSERT_EQ(loaded.relation_count(), built.relation_count());
  for (const auto& rel : built.relations()) {
    auto it = std::find_if(loaded.relations().begin(), loaded.relations().end(),
                           [&](const graph::Relation& r) { return r.name == rel.name; });
    ASSERT_NE(it, loaded.relations().end()) << rel.name;
    EXPECT_EQ(it->adjacency, rel.adjacency) << rel.name;
  }
}

TEST(Synth, RejectsInfeasibleConfigs) {
  auto bad = [](auto edit) {
    SynthConfig c = small();
    edit(c);
    EXPECT_THROW(generate(c), ValidationError);
  };
  bad([](SynthConfig& c) { c.anomaly_fraction = 0.0; });
  bad([](SynthConfig& c) { c.anomaly_fraction = 1.0; });
  bad([](SynthConfig& c) { c.n_users = 3; });
  bad([](SynthConfig& c) { c.camouflage_rate = 1.5; });
  bad([](SynthConfig& c) { c.camouflage_spread = -0.1; });
  bad([](SynthConfig& c) { c.n_relations = 0; });
  bad([](SynthConfig& c) { c.feature_dim = 0; });
  bad([](SynthConfig& c) { c.entities_per_relation = 2; });
}
