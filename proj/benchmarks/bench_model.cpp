#include <benchmark/benchmark.h>

#include <spdlog/spdlog.h>

#include "rau/autodiff/optim.hpp"
#include "rau/layers/layers.hpp"
#include "rau/model/forward.hpp"
#include "rau/model/train.hpp"
#include "rau/synth/generator.hpp"

using namespace rau;

namespace {

const model::PreparedGraph& prepared() {
  static const model::PreparedGraph g(synth::generate(synth::SynthConfig{}));
  return g;
}

}  // namespace

static void BM_Predict(benchmark::State& state) {
  const auto& g = prepared();
  model::ModelConfig c;
  c.variant = static_cast<model::Variant>(state.range(0));
  auto p = model::ModelParams::initialize(c, g.graph().feature_dim(), g.graph().relation_count());
  for (auto _ : state) benchmark::DoNotOptimize(model::predict(g.view(), p, c).probability.data());
  state.SetLabel(std::string(model::to_string(c.variant)));
}
BENCHMARK(BM_Predict)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

// One optimizer step: batch sampling, forward, backward and Adam.
static void BM_TrainStep(benchmark::State& state) {
  spdlog::set_level(spdlog::level::warn);
  const auto& g = prepared();
  model::ModelConfig c;
  c.variant = static_cast<model::Variant>(state.range(0));
  auto split = model::stratified_split(g.graph(), 20, 0);
  auto params = model::ModelParams::initialize(c, g.graph().feature_dim(), g.graph().relation_count());
  auto adam = ad::AdamState::for_params(params.tensors());
  std::vector<Index> seeds(split.train.begin(), split.train.begin() + static_cast<std::ptrdiff_t>(c.batch_size));
  for (auto _ : state) {
    auto batch = model::sample_batch(g, seeds, c.effective_hops());
    ad::Tape tape;
    model::BoundParams bound(params, params.tensors().bind(tape));
    auto f = model::forward(tape, batch.view, bound, c, batch.seed_local);
    auto loss = layers::detection_loss(f.probability, batch.seed_labels, bound.all(), c.lambda);
    tape.backward(loss);
    ad::adam_step(params.tensors(), ad::collect_grads(params.tensors(), bound.all()), adam, c.lr);
    state.counters["batch_nodes"] = static_cast<double>(batch.included.size());
  }
  state.SetLabel(std::string(model::to_string(c.variant)));
}
BENCHMARK(BM_TrainStep)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
