#include <benchmark/benchmark.h>

#include "rau/autodiff/ops.hpp"
#include "rau/graph/ops.hpp"
#include "rau/layers/layers.hpp"
#include "rau/matrix.hpp"
#include "rau/random.hpp"
#include "rau/synth/generator.hpp"

using namespace rau;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Matrix m(r, c);
  for (double& x : m.values()) x = rng.uniform(-1, 1);
  return m;
}

const graph::MultiRelationGraph& synthetic() {
  static const graph::MultiRelationGraph g = synth::generate(synth::SynthConfig{});
  return g;
}

}  // namespace

static void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0)), k = static_cast<std::size_t>(state.range(1));
  Matrix a = random_matrix(n, k, 1), b = random_matrix(k, 64, 2);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
  state.counters["GFLOP/s"] = benchmark::Counter(2.0 * n * k * 64, benchmark::Counter::kIsIterationInvariantRate,
                                                 benchmark::Counter::kIs1000);
}
BENCHMARK(BM_Matmul)->Args({2000, 16})->Args({2000, 64})->Args({2000, 192});

static void BM_MatmulTn(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Matrix a = random_matrix(n, 64, 1), b = random_matrix(n, 64, 2);
  for (auto _ : state) benchmark::DoNotOptimize(matmul_tn(a, b));
}
BENCHMARK(BM_MatmulTn)->Arg(2000);

static void BM_Spmm(benchmark::State& state) {
  const auto& g = synthetic();
  const CsrMatrix a = graph::normalize(g.relation(0)).matrix();
  Matrix h = random_matrix(g.n(), static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(spmm(a, h));
  state.counters["nnz"] = static_cast<double>(a.nnz());
}
BENCHMARK(BM_Spmm)->Arg(16)->Arg(64);

static void BM_BuildRelation(benchmark::State& state) {
  const auto data = synth::generate_dataset(synth::SynthConfig{});
  for (auto _ : state) benchmark::DoNotOptimize(graph::build_relation_graph(data.relations[0].incidence));
}
BENCHMARK(BM_BuildRelation);

static void BM_Normalize(benchmark::State& state) {
  const auto& g = synthetic();
  for (auto _ : state) benchmark::DoNotOptimize(graph::normalize(g.relation(0)));
}
BENCHMARK(BM_Normalize);

static void BM_GatForward(benchmark::State& state) {
  const auto& g = synthetic();
  const CsrMatrix pattern = graph::with_self_loops(graph::merge_relations(g));
  const Matrix h = random_matrix(g.n(), 192, 4);
  std::vector<Matrix> w, a;
  for (int k = 0; k < 4; ++k) {
    w.push_back(random_matrix(192, 16, 5 + k));
    a.push_back(random_matrix(32, 1, 9 + k));
  }
  for (auto _ : state) {
    ad::Tape tape;
    std::vector<layers::GatHead> heads;
    for (int k = 0; k < 4; ++k) heads.push_back({tape.constant(w[k]), tape.constant(a[k])});
    benchmark::DoNotOptimize(layers::gat_forward(pattern, tape.constant(h), heads).output.value().data());
  }
  state.counters["edges"] = static_cast<double>(pattern.nnz());
}
BENCHMARK(BM_GatForward)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
