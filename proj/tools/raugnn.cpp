// raugnn: build relation graphs, train and evaluate the detector from the shell.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "rau/error.hpp"
#include "rau/eval/experiment.hpp"
#include "rau/eval/gradcheck.hpp"
#include "rau/graph/io.hpp"
#include "rau/model/train.hpp"
#include "rau/synth/generator.hpp"

namespace fs = std::filesystem;
using namespace rau;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitGradcheck = 2;
constexpr int kExitInternal = 3;

struct ModelFlags {
  model::ModelConfig config;
  std::string variant = "full";

  void attach(CLI::App* app, bool with_variant = true) {
    if (with_variant) app->add_option("--variant", variant, "full, pr or pa")->capture_default_str();
    app->add_option("--gcn-layers", config.gcn_layers, "GCN layers per relation")->capture_default_str();
    app->add_option("--gat-layers", config.gat_layers, "attention layers")->capture_default_str();
    app->add_option("--heads", config.gat_heads, "attention heads")->capture_default_str();
    app->add_option("--embed-dim", config.embed_dim, "embedding width d'")->capture_default_str();
    app->add_option("--lr", config.lr, "Adam learning rate")->capture_default_str();
    app->add_option("--lambda", config.lambda, "L2 regularization weight")->capture_default_str();
    app->add_option("--batch-size", config.batch_size, "seed nodes per batch")->capture_default_str();
    app->add_option("--epochs", config.epochs, "training epochs")->capture_default_str();
    app->add_option("--hop-count", config.hop_count, "batch neighbourhood depth (0 = receptive field)")
        ->capture_default_str();
    app->add_option("--patience", config.patience, "early-stopping patience in epochs (0 = off)")
        ->capture_default_str();
    app->add_option("--max-neighbors", config.max_neighbors, "neighbour cap per node while batching (0 = none)")
        ->capture_default_str();
  }

  model::ModelConfig resolve() const {
    model::ModelConfig c = config;
    c.variant = model::parse_variant(variant);
    c.validate();
    return c;
  }
};

struct SynthFlags {
  synth::SynthConfig config;

  void attach(CLI::App* app, const std::string& prefix = "") {
    app->add_option("--" + prefix + "n-users", config.n_users, "number of users")->capture_default_str();
    app->add_option("--" + prefix + "anomaly-frac", config.anomaly_fraction, "share of anomalous users")
        ->capture_default_str();
    app->add_option("--" + prefix + "camouflage-rate", config.camouflage_rate,
                    "share of anomalous attachments to benign entities")
        ->capture_default_str();
    app->add_option("--" + prefix + "camouflage-spread", config.camouflage_spread,
                    "relative spread of the camouflage rate across relations")
        ->capture_default_str();
    app->add_option("--" + prefix + "feature-shift", config.feature_shift, "anomalous feature mean offset")
        ->capture_default_str();
    app->add_option("--" + prefix + "relations", config.n_relations, "number of relations")->capture_default_str();
    app->add_option("--" + prefix + "feature-dim", config.feature_dim, "feature dimension")->capture_default_str();
    app->add_option("--" + prefix + "entities", config.entities_per_relation,
                    "benign entities per relation (0 = n_users)")
        ->capture_default_str();
  }
};

std::vector<double> parse_pcts(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : CLI::detail::split(text, ',')) {
    const std::string t = CLI::detail::trim_copy(part);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(t, &used));
      if (used != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw ValidationError("bad percentage '" + t + "'");
    }
  }
  if (out.empty()) throw ValidationError("empty percentage list");
  return out;
}

std::vector<model::Variant> parse_variants(const std::string& text) {
  std::vector<model::Variant> out;
  for (const auto& part : CLI::detail::split(text, ',')) out.push_back(model::parse_variant(CLI::detail::trim_copy(part)));
  return out;
}

std::vector<std::uint64_t> seed_list(std::uint64_t count, std::uint64_t first) {
  if (count == 0) throw ValidationError("--seeds must be >= 1");
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < count; ++i) seeds.push_back(first + i);
  return seeds;
}

graph::MultiRelationGraph load_or_generate(const std::string& path, const SynthFlags& synth, std::uint64_t synth_seed,
                                           std::size_t max_degree) {
  if (!path.empty()) return graph::load_graph(path, {max_degree});
  synth::SynthConfig c = synth.config;
  c.seed = synth_seed;
  spdlog::info("no --graph given; generating a synthetic graph ({} users, seed {})", c.n_users, c.seed);
  return synth::build_graph(synth::generate_dataset(c), {max_degree});
}

void print_metrics(const eval::MetricsReport& m) {
  fmt::print("accuracy  {:.6f}\nrecall    {:.6f}\nloss      {:.6f}\nn_eval    {}\n", m.accuracy, m.recall, m.loss,
             m.n_eval);
  fmt::print("confusion tp={} fp={} tn={} fn={}\n", m.tp, m.fp, m.tn, m.fn);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RAU-GNN anomaly detection on multiple-relation user graphs"};
  app.set_config("--config", "", "key/value config file; command-line flags take precedence");
  app.require_subcommand(1);
  bool verbose = false;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");
  app.add_flag("-q,--quiet", quiet, "warnings and errors only");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "validate a dataset directory and cache it as graph.bin");
  std::string ingest_dir, ingest_out = "graph.bin";
  std::size_t max_degree = 1000;
  ingest->add_option("dir", ingest_dir, "dataset directory")->required();
  ingest->add_option("--out", ingest_out, "output cache file")->capture_default_str();
  ingest->add_option("--max-entity-degree", max_degree, "skip entities shared by more users (0 = no cap)")
      ->capture_default_str();

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic dataset directory");
  SynthFlags synth_flags;
  synth_flags.attach(synth_cmd);
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  synth_cmd->add_option("--seed", synth_seed, "generator seed")->capture_default_str();
  synth_cmd->add_option("--out", synth_out, "output directory")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "train one model and write a checkpoint");
  ModelFlags train_flags;
  std::string train_graph, train_out;
  double train_pct = 20;
  train_flags.attach(train_cmd);
  train_cmd->add_option("--graph", train_graph, "dataset directory or graph.bin")->required();
  train_cmd->add_option("--train-pct", train_pct, "percentage of labeled nodes used for training")
      ->capture_default_str();
  train_cmd->add_option("--seed", train_flags.config.seed, "run seed (split and model)")->capture_default_str();
  train_cmd->add_option("--out", train_out, "checkpoint directory")->required();
  train_cmd->add_option("--max-entity-degree", max_degree, "entity degree cap for dataset directories")
      ->capture_default_str();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "score a checkpoint on its held-out split");
  std::string eval_graph, eval_ckpt;
  bool eval_all = false;
  eval_cmd->add_option("--graph", eval_graph, "dataset directory or graph.bin")->required();
  eval_cmd->add_option("--ckpt", eval_ckpt, "checkpoint directory")->required();
  eval_cmd->add_flag("--all-labeled", eval_all, "score every labeled node instead of the test split");
  eval_cmd->add_option("--max-entity-degree", max_degree, "entity degree cap for dataset directories")
      ->capture_default_str();

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "variant x train_pct x seed grid");
  ModelFlags exp_flags;
  SynthFlags exp_synth;
  std::string exp_graph, exp_pcts = "10,20,30,40", exp_variants = "full,pr,pa", exp_out = "results.csv";
  std::uint64_t exp_seeds = 5, exp_first_seed = 0, exp_synth_seed = 0;
  bool track_best = false;
  exp_flags.attach(exp_cmd, false);
  exp_synth.attach(exp_cmd, "synth-");
  exp_cmd->add_option("--graph", exp_graph, "dataset directory or graph.bin (default: synthetic)");
  exp_cmd->add_option("--synth-seed", exp_synth_seed, "seed of the synthetic graph")->capture_default_str();
  exp_cmd->add_option("--train-pcts", exp_pcts, "comma-separated training percentages")->capture_default_str();
  exp_cmd->add_option("--seeds", exp_seeds, "number of run seeds")->capture_default_str();
  exp_cmd->add_option("--first-seed", exp_first_seed, "first run seed")->capture_default_str();
  exp_cmd->add_option("--variants", exp_variants, "comma-separated variants")->capture_default_str();
  exp_cmd->add_option("--out", exp_out, "results CSV")->capture_default_str();
  exp_cmd->add_flag("--track-best", track_best, "also report the best epoch on the test split (best_* columns)");
  exp_cmd->add_option("--max-entity-degree", max_degree, "entity degree cap for dataset directories")
      ->capture_default_str();

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "gcn_layers x embed_dim grid");
  ModelFlags sweep_flags;
  SynthFlags sweep_synth;
  std::string sweep_graph, sweep_layers = "1,2,3", sweep_dims = "16,32,64,128", sweep_out = "sweep.csv";
  double sweep_pct = 20;
  std::uint64_t sweep_seeds = 1, sweep_synth_seed = 0;
  sweep_flags.attach(sweep_cmd);
  sweep_synth.attach(sweep_cmd, "synth-");
  sweep_cmd->add_option("--graph", sweep_graph, "dataset directory or graph.bin (default: synthetic)");
  sweep_cmd->add_option("--synth-seed", sweep_synth_seed, "seed of the synthetic graph")->capture_default_str();
  sweep_cmd->add_option("--gcn-layer-grid", sweep_layers, "comma-separated GCN depths")->capture_default_str();
  sweep_cmd->add_option("--embed-dim-grid", sweep_dims, "comma-separated embedding widths")->capture_default_str();
  sweep_cmd->add_option("--train-pct", sweep_pct, "training percentage")->capture_default_str();
  sweep_cmd->add_option("--seeds", sweep_seeds, "number of run seeds")->capture_default_str();
  sweep_cmd->add_option("--out", sweep_out, "sweep CSV")->capture_default_str();
  sweep_cmd->add_option("--max-entity-degree", max_degree, "entity degree cap for dataset directories")
      ->capture_default_str();

  // gradcheck
  auto* grad_cmd = app.add_subcommand("gradcheck", "finite-difference check of every model parameter");
  std::uint64_t grad_seed = 0;
  std::string grad_variant = "full";
  grad_cmd->add_option("--seed", grad_seed, "graph seed")->capture_default_str();
  grad_cmd->add_option("--variant", grad_variant, "full, pr or pa")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }
  spdlog::set_level(verbose ? spdlog::level::debug : quiet ? spdlog::level::warn : spdlog::level::info);

  try {
    if (*ingest) {
      const auto g = graph::load_dataset_dir(ingest_dir, {max_degree});
      graph::save_graph_bin(ingest_out, g);
      const fs::path index = fs::path(ingest_out).parent_path() / "node_index.csv";
      graph::write_node_index(index, g.node_ids());
      fmt::print("{} nodes, {} features, {} relations, {} labeled ({} anomalous) -> {}\n", g.n(), g.feature_dim(),
                 g.relation_count(), g.labeled_nodes().size(), g.count_label(graph::Label::kAnomalous), ingest_out);
      for (const auto& rel : g.relations()) fmt::print("  relation {}: {} edges\n", rel.name, rel.adjacency.edge_count());
      return kExitOk;
    }

    if (*synth_cmd) {
      synth::SynthConfig c = synth_flags.config;
      c.seed = synth_seed;
      const auto data = synth::generate_dataset(c);
      synth::write_dataset(synth_out, data);
      fmt::print("wrote {} users ({} anomalous) with {} relations to {}\n", c.n_users, c.anomaly_count(),
                 data.relations.size(), synth_out);
      return kExitOk;
    }

    if (*train_cmd) {
      const model::ModelConfig config = train_flags.resolve();
      const model::PreparedGraph g(graph::load_graph(train_graph, {max_degree}));
      const model::Split split = model::stratified_split(g.graph(), train_pct, config.seed);
      spdlog::info("training {} on {} nodes ({} held out)", model::to_string(config.variant), split.train.size(),
                   split.test.size());
      const model::TrainResult result = model::train(g, split.train, config);
      model::CheckpointMeta meta;
      meta.config = config;
      meta.feature_dim = g.graph().feature_dim();
      meta.n_relations = g.graph().relation_count();
      for (const auto& rel : g.graph().relations()) meta.relation_names.push_back(rel.name);
      meta.train_pct = train_pct;
      meta.epochs_run = result.epochs_run;
      model::save_checkpoint(train_out, result.params, meta, result.losses);
      if (!result.losses.empty())
        fmt::print("{} steps, final loss {:.6f} -> {}\n", result.losses.size(), result.losses.back(), train_out);
      else
        fmt::print("0 steps -> {}\n", train_out);
      return kExitOk;
    }

    if (*eval_cmd) {
      const model::Checkpoint ck = model::load_checkpoint(eval_ckpt);
      const model::PreparedGraph g(graph::load_graph(eval_graph, {max_degree}));
      if (g.graph().feature_dim() != ck.meta.feature_dim || g.graph().relation_count() != ck.meta.n_relations)
        throw ValidationError("checkpoint was trained on a graph with a different feature or relation count");
      std::vector<Index> nodes = eval_all ? g.graph().labeled_nodes()
                                          : model::stratified_split(g.graph(), ck.meta.train_pct, ck.meta.config.seed).test;
      print_metrics(eval::evaluate(g, ck.params, ck.meta.config, nodes));
      return kExitOk;
    }

    if (*exp_cmd) {
      eval::ExperimentSpec spec;
      spec.base = exp_flags.resolve();
      spec.variants = parse_variants(exp_variants);
      spec.train_pcts = parse_pcts(exp_pcts);
      spec.seeds = seed_list(exp_seeds, exp_first_seed);
      spec.track_best_epoch = track_best;
      const model::PreparedGraph g(load_or_generate(exp_graph, exp_synth, exp_synth_seed, max_degree));
      const auto runs = eval::run_experiment(g, spec);
      eval::write_results_csv(exp_out, runs, track_best);
      const auto summary = eval::summarize(runs);
      eval::write_summary_csv(eval::sidecar_path(exp_out, "summary"), summary);
      eval::write_timings_csv(eval::sidecar_path(exp_out, "timings"), runs);
      fmt::print("{:<8}{:>10}{:>6}{:>12}{:>12}\n", "variant", "train_pct", "runs", "median_acc", "median_rec");
      for (const auto& s : summary)
        fmt::print("{:<8}{:>10}{:>6}{:>12.4f}{:>12.4f}\n", model::to_string(s.variant), s.train_pct, s.runs,
                   s.median_accuracy, s.median_recall);
      return kExitOk;
    }

    if (*sweep_cmd) {
      eval::SweepSpec spec;
      spec.base = sweep_flags.resolve();
      spec.gcn_layers.clear();
      for (double v : parse_pcts(sweep_layers)) spec.gcn_layers.push_back(static_cast<std::size_t>(v));
      spec.embed_dims.clear();
      for (double v : parse_pcts(sweep_dims)) spec.embed_dims.push_back(static_cast<std::size_t>(v));
      spec.train_pct = sweep_pct;
      spec.seeds = seed_list(sweep_seeds, 0);
      const model::PreparedGraph g(load_or_generate(sweep_graph, sweep_synth, sweep_synth_seed, max_degree));
      eval::write_sweep_csv(sweep_out, eval::run_sweep(g, spec));
      fmt::print("wrote {}\n", sweep_out);
      return kExitOk;
    }

    if (*grad_cmd) {
      model::ModelConfig config = eval::gradcheck_config();
      config.variant = model::parse_variant(grad_variant);
      const auto g = eval::gradcheck_graph(grad_seed);
      const auto r = eval::model_gradcheck(g, config);
      if (!r.diagnostic.empty()) {
        fmt::print("gradcheck: {}\n", r.diagnostic);
        return kExitGradcheck;
      }
      fmt::print("checked {} scalars, worst relative error {:.3e} at {}[{}] (analytic {:.6e}, numeric {:.6e})\n",
                 r.checked, r.max_relative_error, r.worst_parameter, r.worst_index, r.worst_analytic, r.worst_numeric);
      fmt::print("{}\n", r.passed ? "PASS" : "FAIL");
      return r.passed ? kExitOk : kExitGradcheck;
    }
  } catch (const ValidationError& e) {
    spdlog::error("{}", e.what());
    return kExitValidation;
  } catch (const fs::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    spdlog::critical("internal error: {}", e.what());
    return kExitInternal;
  }
  return kExitOk;
}
