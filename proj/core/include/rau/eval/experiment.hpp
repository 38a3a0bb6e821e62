#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "rau/eval/metrics.hpp"
#include "rau/model/config.hpp"
#include "rau/model/graph_view.hpp"

namespace rau::eval {

struct ExperimentSpec {
  model::ModelConfig base;
  std::vector<model::Variant> variants{model::Variant::kFull, model::Variant::kPr, model::Variant::kPa};
  std::vector<double> train_pcts{10, 20, 30, 40};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  /// Also score the test split after every epoch and keep the best epoch.
  /// This selects on test data, so the columns are labeled best_*.
  bool track_best_epoch = false;
};

struct RunResult {
  model::Variant variant = model::Variant::kFull;
  double train_pct = 0.0;
  std::uint64_t seed = 0;
  MetricsReport metrics;  // final epoch
  std::vector<double> losses;
  std::size_t epochs_run = 0;
  double wall_time_s = 0.0;
  std::size_t best_epoch = 0;  // 1-based; 0 when not tracked
  MetricsReport best;
};

/// One split -> train -> evaluate run. The seed drives both the split and the model.
RunResult run_once(const model::PreparedGraph& g, model::ModelConfig config, double train_pct, std::uint64_t seed,
                   bool track_best_epoch = false);

using RunObserver = std::function<void(const RunResult&)>;

/// Every (variant, train_pct, seed) combination; results sorted by that key.
std::vector<RunResult> run_experiment(const model::PreparedGraph& g, const ExperimentSpec& spec,
                                      const RunObserver& observer = {});

struct SummaryRow {
  model::Variant variant = model::Variant::kFull;
  double train_pct = 0.0;
  std::size_t runs = 0;
  double median_accuracy = 0.0;
  double median_recall = 0.0;
  double median_loss = 0.0;
};

double median(std::vector<double> values);
std::vector<SummaryRow> summarize(const std::vector<RunResult>& runs);

/// variant,train_pct,seed,accuracy,recall,loss (+ best_* columns when tracked).
/// Contains no timing, so identical configs give identical files.
void write_results_csv(const std::filesystem::path& path, const std::vector<RunResult>& runs,
                       bool include_best = false);
/// variant,train_pct,seed,epochs_run,wall_time_s
void write_timings_csv(const std::filesystem::path& path, const std::vector<RunResult>& runs);
/// variant,train_pct,runs,median_accuracy,median_recall,median_loss
void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows);

/// Sidecar paths next to a results file: results.csv -> results.summary.csv / results.timings.csv.
std::filesystem::path sidecar_path(const std::filesystem::path& results, const std::string& tag);

struct SweepSpec {
  model::ModelConfig base;
  std::vector<std::size_t> gcn_layers{1, 2, 3};
  std::vector<std::size_t> embed_dims{16, 32, 64, 128};
  double train_pct = 20;
  std::vector<std::uint64_t> seeds{0};
};

struct SweepRow {
  std::size_t gcn_layers = 0;
  std::size_t embed_dim = 0;
  RunResult run;
};

std::vector<SweepRow> run_sweep(const model::PreparedGraph& g, const SweepSpec& spec,
                                const std::function<void(const SweepRow&)>& observer = {});
/// gcn_layers,embed_dim,train_pct,seed,accuracy,recall,loss
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

}  // namespace rau::eval
