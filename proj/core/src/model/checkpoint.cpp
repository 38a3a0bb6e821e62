#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "rau/autodiff/weights_io.hpp"
#include "rau/error.hpp"
#include "rau/model/train.hpp"

namespace rau::model {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kMetaFormat = "raugnn-checkpoint";
constexpr int kMetaVersion = 1;

template <class T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("meta.json: missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("meta.json: bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

std::string config_to_json(const CheckpointMeta& meta) {
  const ModelConfig& c = meta.config;
  json j;
  j["format"] = kMetaFormat;
  j["version"] = kMetaVersion;
  j["variant"] = std::string(to_string(c.variant));
  j["gcn_layers"] = c.gcn_layers;
  j["gat_layers"] = c.gat_layers;
  j["gat_heads"] = c.gat_heads;
  j["embed_dim"] = c.embed_dim;
  j["lr"] = c.lr;
  j["lambda"] = c.lambda;
  j["batch_size"] = c.batch_size;
  j["epochs"] = c.epochs;
  j["seed"] = c.seed;
  j["hop_count"] = c.hop_count;
  j["patience"] = c.patience;
  j["max_neighbors"] = c.max_neighbors;
  j["feature_dim"] = meta.feature_dim;
  j["n_relations"] = meta.n_relations;
  j["relations"] = meta.relation_names;
  j["train_pct"] = meta.train_pct;
  j["epochs_run"] = meta.epochs_run;
  return j.dump(2) + "\n";
}

CheckpointMeta config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("meta.json: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("meta.json: expected an object");
  if (required<std::string>(j, "format") != kMetaFormat) throw ValidationError("meta.json: not a raugnn checkpoint");
  if (required<int>(j, "version") != kMetaVersion) throw ValidationError("meta.json: unsupported version");

  CheckpointMeta m;
  ModelConfig& c = m.config;
  c.variant = parse_variant(required<std::string>(j, "variant"));
  c.gcn_layers = required<std::size_t>(j, "gcn_layers");
  c.gat_layers = required<std::size_t>(j, "gat_layers");
  c.gat_heads = required<std::size_t>(j, "gat_heads");
  c.embed_dim = required<std::size_t>(j, "embed_dim");
  c.lr = required<double>(j, "lr");
  c.lambda = required<double>(j, "lambda");
  c.batch_size = required<std::size_t>(j, "batch_size");
  c.epochs = required<std::size_t>(j, "epochs");
  c.seed = required<std::uint64_t>(j, "seed");
  c.hop_count = required<std::size_t>(j, "hop_count");
  c.patience = required<std::size_t>(j, "patience");
  c.max_neighbors = required<std::size_t>(j, "max_neighbors");
  c.validate();
  m.feature_dim = required<std::size_t>(j, "feature_dim");
  m.n_relations = required<std::size_t>(j, "n_relations");
  m.relation_names = required<std::vector<std::string>>(j, "relations");
  m.train_pct = required<double>(j, "train_pct");
  m.epochs_run = required<std::size_t>(j, "epochs_run");
  if (m.relation_names.size() != m.n_relations) throw ValidationError("meta.json: relation list length mismatch");
  return m;
}

void save_checkpoint(const fs::path& dir, const ModelParams& params, const CheckpointMeta& meta,
                     std::span<const double> losses) {
  fs::create_directories(dir);
  ad::save_weights(dir / "weights.bin", params.tensors());

  std::ofstream m(dir / "meta.json", std::ios::binary);
  if (!m) throw ValidationError("cannot write " + (dir / "meta.json").string());
  m << config_to_json(meta);

  std::ofstream t(dir / "loss_trajectory.csv", std::ios::binary);
  if (!t) throw ValidationError("cannot write " + (dir / "loss_trajectory.csv").string());
  t << "step,loss\n";
  for (std::size_t i = 0; i < losses.size(); ++i) t << fmt::format("{},{:.17g}\n", i + 1, losses[i]);
}

Checkpoint load_checkpoint(const fs::path& dir) {
  std::ifstream m(dir / "meta.json", std::ios::binary);
  if (!m) throw ValidationError("checkpoint: cannot read " + (dir / "meta.json").string());
  std::stringstream buf;
  buf << m.rdbuf();
  Checkpoint ck;
  ck.meta = config_from_json(buf.str());
  ck.params = ModelParams::adopt(ad::load_weights(dir / "weights.bin"), ck.meta.config, ck.meta.feature_dim,
                                 ck.meta.n_relations);
  return ck;
}

}  // namespace rau::model
