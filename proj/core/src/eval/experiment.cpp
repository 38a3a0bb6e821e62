#include "rau/eval/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <tuple>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "rau/error.hpp"
#include "rau/model/train.hpp"

namespace rau::eval {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

// Shortest representation that round-trips, so equal doubles print equally.
std::string real(double v) { return fmt::format("{}", v); }

auto run_key(const RunResult& r) { return std::make_tuple(static_cast<int>(r.variant), r.train_pct, r.seed); }

}  // namespace

RunResult run_once(const model::PreparedGraph& g, model::ModelConfig config, double train_pct, std::uint64_t seed,
                   bool track_best_epoch) {
  const auto start = std::chrono::steady_clock::now();
  config.seed = seed;
  const model::Split split = model::stratified_split(g.graph(), train_pct, seed);
  if (split.test.empty()) throw ValidationError("experiment: empty test split");

  RunResult r;
  r.variant = config.variant;
  r.train_pct = train_pct;
  r.seed = seed;
  model::EpochCallback on_epoch;
  if (track_best_epoch) {
    on_epoch = [&](std::size_t epoch, const model::ModelParams& params) {
      MetricsReport m = evaluate(g, params, config, split.test);
      if (epoch == 0 || m.accuracy > r.best.accuracy) {
        r.best = m;
        r.best_epoch = epoch + 1;
      }
    };
  }
  model::TrainResult trained = model::train(g, split.train, config, on_epoch);
  r.metrics = evaluate(g, trained.params, config, split.test);
  r.losses = std::move(trained.losses);
  r.epochs_run = trained.epochs_run;
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<RunResult> run_experiment(const model::PreparedGraph& g, const ExperimentSpec& spec,
                                      const RunObserver& observer) {
  if (spec.variants.empty() || spec.train_pcts.empty() || spec.seeds.empty())
    throw ValidationError("experiment: variants, train_pcts and seeds must be non-empty");
  std::vector<RunResult> runs;
  for (model::Variant v : spec.variants) {
    for (double pct : spec.train_pcts) {
      for (std::uint64_t seed : spec.seeds) {
        model::ModelConfig config = spec.base;
        config.variant = v;
        RunResult r = run_once(g, config, pct, seed, spec.track_best_epoch);
        spdlog::info("{} train_pct={} seed={}: accuracy {:.4f} recall {:.4f} ({:.1f}s)", model::to_string(v), pct,
                     seed, r.metrics.accuracy, r.metrics.recall, r.wall_time_s);
        if (observer) observer(r);
        runs.push_back(std::move(r));
      }
    }
  }
  std::stable_sort(runs.begin(), runs.end(), [](const RunResult& a, const RunResult& b) { return run_key(a) < run_key(b); });
  return runs;
}

double median(std::vector<double> values) {
  if (values.empty()) throw ValidationError("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<SummaryRow> summarize(const std::vector<RunResult>& runs) {
  std::map<std::pair<int, double>, std::vector<const RunResult*>> groups;
  for (const auto& r : runs) groups[{static_cast<int>(r.variant), r.train_pct}].push_back(&r);
  std::vector<SummaryRow> rows;
  for (const auto& [key, members] : groups) {
    SummaryRow s;
    s.variant = members.front()->variant;
    s.train_pct = key.second;
    s.runs = members.size();
    std::vector<double> acc, rec, loss;
    for (const RunResult* r : members) {
      acc.push_back(r->metrics.accuracy);
      rec.push_back(r->metrics.recall);
      loss.push_back(r->metrics.loss);
    }
    s.median_accuracy = median(acc);
    s.median_recall = median(rec);
    s.median_loss = median(loss);
    rows.push_back(s);
  }
  return rows;
}

void write_results_csv(const fs::path& path, const std::vector<RunResult>& runs, bool include_best) {
  auto out = open_out(path);
  out << "variant,train_pct,seed,accuracy,recall,loss";
  if (include_best) out << ",best_epoch,best_accuracy,best_recall";
  out << '\n';
  for (const auto& r : runs) {
    out << model::to_string(r.variant) << ',' << real(r.train_pct) << ',' << r.seed << ',' << real(r.metrics.accuracy)
        << ',' << real(r.metrics.recall) << ',' << real(r.metrics.loss);
    if (include_best) out << ',' << r.best_epoch << ',' << real(r.best.accuracy) << ',' << real(r.best.recall);
    out << '\n';
  }
}

void write_timings_csv(const fs::path& path, const std::vector<RunResult>& runs) {
  auto out = open_out(path);
  out << "variant,train_pct,seed,epochs_run,wall_time_s\n";
  for (const auto& r : runs)
    out << fmt::format("{},{},{},{},{:.3f}\n", model::to_string(r.variant), real(r.train_pct), r.seed, r.epochs_run,
                       r.wall_time_s);
}

void write_summary_csv(const fs::path& path, const std::vector<SummaryRow>& rows) {
  auto out = open_out(path);
  out << "variant,train_pct,runs,median_accuracy,median_recall,median_loss\n";
  for (const auto& s : rows)
    out << model::to_string(s.variant) << ',' << real(s.train_pct) << ',' << s.runs << ',' << real(s.median_accuracy)
        << ',' << real(s.median_recall) << ',' << real(s.median_loss) << '\n';
}

fs::path sidecar_path(const fs::path& results, const std::string& tag) {
  fs::path p = results;
  const std::string ext = p.has_extension() ? p.extension().string() : std::string(".csv");
  p.replace_extension();
  return p.string() + "." + tag + ext;
}

std::vector<SweepRow> run_sweep(const model::PreparedGraph& g, const SweepSpec& spec,
                                const std::function<void(const SweepRow&)>& observer) {
  if (spec.gcn_layers.empty() || spec.embed_dims.empty() || spec.seeds.empty())
    throw ValidationError("sweep: empty grid");
  std::vector<SweepRow> rows;
  for (std::size_t layers : spec.gcn_layers) {
    for (std::size_t dim : spec.embed_dims) {
      for (std::uint64_t seed : spec.seeds) {
        model::ModelConfig config = spec.base;
        config.gcn_layers = layers;
        config.embed_dim = dim;
        SweepRow row{layers, dim, run_once(g, config, spec.train_pct, seed)};
        spdlog::info("sweep gcn_layers={} embed_dim={} seed={}: accuracy {:.4f}", layers, dim, seed,
                     row.run.metrics.accuracy);
        if (observer) observer(row);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

void write_sweep_csv(const fs::path& path, const std::vector<SweepRow>& rows) {
  auto out = open_out(path);
  out << "gcn_layers,embed_dim,train_pct,seed,accuracy,recall,loss\n";
  for (const auto& row : rows)
    out << row.gcn_layers << ',' << row.embed_dim << ',' << real(row.run.train_pct) << ',' << row.run.seed << ','
        << real(row.run.metrics.accuracy) << ',' << real(row.run.metrics.recall) << ',' << real(row.run.metrics.loss)
        << '\n';
}

}  // namespace rau::eval
