#include <gtest/gtest.h>

#include <fstream>

#include "rau/error.hpp"
#include "rau/graph/io.hpp"
#include "rau/graph/ops.hpp"
#include "support.hpp"

using namespace rau;
using namespace rau::graph;

namespace {

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

void write_minimal(const std::filesystem::path& dir) {
  write(dir / "features.csv", "node_id,f0,f1\nalice,1.5,-2\nbob,0,3e-3\n\"c,d\",7,8\n");
  write(dir / "labels.csv", "node_id,label\nalice,1\nbob,0\n\"c,d\",\n");
  write(dir / "incidence_post.csv", "node_id,entity_id\nalice,p1\nbob,p1\n\"c,d\",p2\nbob,p2\nbob,p2\n");
}

}  // namespace

TEST(DatasetDir, ParsesMinimalLayout) {
  test::TempDir dir("ds_min");
  write_minimal(dir.path);
  write(dir.path / "edges_follow.csv", "src,dst\nalice,\"c,d\"\n");
  MultiRelationGraph g = load_dataset_dir(dir.path);
  ASSERT_EQ(g.n(), 3u);
  EXPECT_EQ(g.features(), Matrix::from_rows({{1.5, -2}, {0, 3e-3}, {7, 8}}));
  EXPECT_EQ(g.labels(), (std::vector<Label>{Label::kAnomalous, Label::kBenign, Label::kUnlabeled}));
  EXPECT_EQ(g.node_ids(), (std::vector<std::string>{"alice", "bob", "c,d"}));
  ASSERT_EQ(g.relation_count(), 2u);
  EXPECT_EQ(g.relations()[0].name, "follow");
  EXPECT_EQ(g.relation(0).matrix().to_dense(), Matrix::from_rows({{0, 0, 1}, {0, 0, 0}, {1, 0, 0}}));
  EXPECT_EQ(g.relations()[1].name, "post");
  EXPECT_EQ(g.relation(1).matrix().to_dense(), Matrix::from_rows({{0, 1, 0}, {1, 0, 1}, {0, 1, 0}}));
}

TEST(DatasetDir, ToleratesCrlfAndBlankLines) {
  test::TempDir dir("ds_crlf");
  write(dir.path / "features.csv", "node_id,f0\r\na,1\r\n\r\nb,2\r\n");
  write(dir.path / "labels.csv", "node_id,label\r\na,0\r\nb,1\r\n");
  write(dir.path / "incidence_x.csv", "node_id,entity_id\r\na,e\r\nb,e\r\n");
  MultiRelationGraph g = load_dataset_dir(dir.path);
  EXPECT_EQ(g.n(), 2u);
  EXPECT_DOUBLE_EQ(g.relation(0).matrix().at(0, 1), 1.0);
}

TEST(DatasetDir, RejectsMalformedInput) {
  auto expect_error = [](const std::function<void(const std::filesystem::path&)>& corrupt, const std::string& needle) {
    test::TempDir dir("ds_bad");
    write_minimal(dir.path);
    corrupt(dir.path);
    try {
      load_dataset_dir(dir.path);
      ADD_FAILURE() << "no error for " << needle;
    } catch (const ValidationError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_error([](auto d) { write(d / "features.csv", "id,f0\na,1\n"); }, "features.csv");
  expect_error([](auto d) { write(d / "features.csv", "node_id,f0\na,nan\n"); }, "features.csv:2");
  expect_error([](auto d) { write(d / "features.csv", "node_id,f0\na,1\na,2\n"); }, "duplicate");
  expect_error([](auto d) { write(d / "features.csv", "node_id,f0,f1\na,1\n"); }, "features.csv:2");
  expect_error([](auto d) { write(d / "labels.csv", "node_id,label\nalice,2\n"); }, "labels.csv:2");
  expect_error([](auto d) { write(d / "labels.csv", "node_id,label\nzed,1\n"); }, "zed");
  expect_error([](auto d) { write(d / "incidence_post.csv", "node_id,entity_id\nghost,p1\n"); }, "ghost");
  expect_error([](auto d) { write(d / "edges_post.csv", "src,dst\nalice,bob\n"); }, "post");
  expect_error([](auto d) { std::filesystem::remove(d / "features.csv"); }, "features.csv");
  expect_error([](auto d) { std::filesystem::remove(d / "incidence_post.csv"); }, "relation");
}

TEST(DatasetDir, WriteThenLoadRoundTrip) {
  SplitMix64 rng(51);
  const std::size_t n = 20;
  Matrix x = test::random_matrix(n, 3, rng);
  std::vector<Label> labels(n);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = static_cast<Label>(static_cast<int>(rng.below(3)) - 1);
    ids.push_back(i == 3 ? "quote\"and,comma" : "n" + std::to_string(i));
  }
  std::vector<NamedIncidence> rel{{"a", test::random_incidence(n, 6, 0.3, rng), {}},
                                  {"b", test::random_incidence(n, 4, 0.2, rng), {}}};
  test::TempDir dir("ds_rt");
  write_dataset_dir(dir.path, x, labels, ids, rel);
  MultiRelationGraph g = load_dataset_dir(dir.path);
  EXPECT_EQ(g.features(), x);  // shortest round-trip formatting is exact
  EXPECT_EQ(g.labels(), labels);
  EXPECT_EQ(g.node_ids(), ids);
  for (std::size_t r = 0; r < 2; ++r) EXPECT_EQ(g.relation(r), build_relation_graph(rel[r].incidence));
}

TEST(GraphBin, RoundTripAndCorruption) {
  auto g = test::random_graph(15, 3, 4, 0.3, 52);
  MultiRelationGraph named(g.features(), g.relations(), g.labels(),
                           std::vector<std::string>{"a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l", "m",
                                                    "n", "o"});
  test::TempDir dir("bin");
  for (const auto& graph : {g, named}) {
    save_graph_bin(dir.path / "g.bin", graph);
    EXPECT_EQ(load_graph_bin(dir.path / "g.bin"), graph);
    EXPECT_EQ(load_graph(dir.path / "g.bin"), graph);
  }
  std::string bytes = test::read_file(dir.path / "g.bin");
  write(dir.path / "t.bin", bytes.substr(0, bytes.size() / 2));
  EXPECT_THROW(load_graph_bin(dir.path / "t.bin"), ValidationError);
  write(dir.path / "m.bin", "NOPE" + bytes.substr(4));
  EXPECT_THROW(load_graph_bin(dir.path / "m.bin"), ValidationError);
  EXPECT_THROW(load_graph(dir.path / "missing"), ValidationError);
}

TEST(NodeIndex, WritesHeaderAndRows) {
  test::TempDir dir("idx");
  write_node_index(dir.path / "node_index.csv", {"x", "y"});
  EXPECT_EQ(test::read_file(dir.path / "node_index.csv"), "node_id,index\nx,0\ny,1\n");
}
