#include "rau/model/params.hpp"

#include <string>

#include "rau/autodiff/optim.hpp"
#include "rau/error.hpp"
#include "rau/random.hpp"

namespace rau::model {
namespace {

std::string gcn_name(std::size_t r, std::size_t l) {
  return "gcn.r" + std::to_string(r) + ".l" + std::to_string(l) + ".weight";
}
std::string gat_name(std::size_t l, std::size_t k, const char* what) {
  return "gat.l" + std::to_string(l) + ".h" + std::to_string(k) + "." + what;
}

struct Shape {
  std::string name;
  std::size_t rows;
  std::size_t cols;
  bool bias;
};

std::vector<Shape> layout(const ModelConfig& c, std::size_t feature_dim, std::size_t n_relations) {
  c.validate();
  if (feature_dim == 0 || n_relations == 0) throw ValidationError("model: empty feature or relation set");
  std::vector<Shape> shapes;
  const std::size_t d = c.embed_dim;
  const std::size_t d_head = d / c.gat_heads;
  std::size_t attention_in = feature_dim;
  if (c.variant != Variant::kPr) {
    for (std::size_t r = 0; r < n_relations; ++r)
      for (std::size_t l = 0; l < c.gcn_layers; ++l)
        shapes.push_back({gcn_name(r, l), l == 0 ? feature_dim : d, d, false});
    attention_in = n_relations * d;
  }
  for (std::size_t l = 0; l < c.gat_layers; ++l) {
    const std::size_t in = l == 0 ? attention_in : d;
    for (std::size_t k = 0; k < c.gat_heads; ++k) {
      shapes.push_back({gat_name(l, k, "transform"), in, d_head, false});
      shapes.push_back({gat_name(l, k, "attention"), 2 * d_head, 1, false});
    }
  }
  shapes.push_back({"mlp.hidden.weight", d, d, false});
  shapes.push_back({"mlp.hidden.bias", 1, d, true});
  shapes.push_back({"mlp.out.weight", d, 1, false});
  shapes.push_back({"mlp.out.bias", 1, 1, true});
  return shapes;
}

}  // namespace

ModelParams ModelParams::initialize(const ModelConfig& config, std::size_t feature_dim,
                                    std::size_t n_relations) {
  ModelParams p;
  for (const auto& s : layout(config, feature_dim, n_relations)) {
    Matrix value = s.bias ? Matrix(s.rows, s.cols)
                          : ad::xavier_uniform(s.rows, s.cols, derive_seed(config.seed, s.name));
    p.tensors_.add(s.name, std::move(value));
  }
  p.variant_ = config.variant;
  p.gcn_layers_ = config.variant == Variant::kPr ? 0 : config.gcn_layers;
  p.gat_layers_ = config.gat_layers;
  p.heads_ = config.gat_heads;
  p.n_relations_ = n_relations;
  p.feature_dim_ = feature_dim;
  return p;
}

ModelParams ModelParams::adopt(ad::ParamSet tensors, const ModelConfig& config, std::size_t feature_dim,
                               std::size_t n_relations) {
  const auto shapes = layout(config, feature_dim, n_relations);
  if (tensors.size() != shapes.size())
    throw ValidationError("model: expected " + std::to_string(shapes.size()) + " parameter tensors, found " +
                          std::to_string(tensors.size()));
  ModelParams p;
  for (const auto& s : shapes) {
    const Matrix& m = tensors.get(s.name);
    if (m.rows() != s.rows || m.cols() != s.cols)
      throw ValidationError("model: parameter '" + s.name + "' has shape " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) + ", expected " + std::to_string(s.rows) + "x" +
                            std::to_string(s.cols));
    p.tensors_.add(s.name, m);
  }
  p.variant_ = config.variant;
  p.gcn_layers_ = config.variant == Variant::kPr ? 0 : config.gcn_layers;
  p.gat_layers_ = config.gat_layers;
  p.heads_ = config.gat_heads;
  p.n_relations_ = n_relations;
  p.feature_dim_ = feature_dim;
  return p;
}

std::size_t ModelParams::gcn_weight(std::size_t relation, std::size_t layer) const {
  if (relation >= n_relations_ || layer >= gcn_layers_) throw ValidationError("model: no such GCN weight");
  return relation * gcn_layers_ + layer;
}

std::size_t ModelParams::gat_transform(std::size_t layer, std::size_t head) const {
  if (layer >= gat_layers_ || head >= heads_) throw ValidationError("model: no such attention head");
  return n_relations_ * gcn_layers_ + 2 * (layer * heads_ + head);
}

std::size_t ModelParams::gat_attention(std::size_t layer, std::size_t head) const {
  return gat_transform(layer, head) + 1;
}

std::size_t ModelParams::mlp_hidden_weight() const { return tensors_.size() - 4; }
std::size_t ModelParams::mlp_hidden_bias() const { return tensors_.size() - 3; }
std::size_t ModelParams::mlp_out_weight() const { return tensors_.size() - 2; }
std::size_t ModelParams::mlp_out_bias() const { return tensors_.size() - 1; }

BoundParams::BoundParams(const ModelParams& params, std::vector<ad::Var> vars)
    : params_(&params), vars_(std::move(vars)) {
  if (vars_.size() != params.tensors().size()) throw ShapeError("BoundParams: binding count mismatch");
}

ad::Var BoundParams::gcn_weight(std::size_t relation, std::size_t layer) const {
  return vars_[params_->gcn_weight(relation, layer)];
}

std::vector<layers::GatHead> BoundParams::gat_heads(std::size_t layer, std::size_t heads) const {
  std::vector<layers::GatHead> out;
  for (std::size_t k = 0; k < heads; ++k)
    out.push_back({vars_[params_->gat_transform(layer, k)], vars_[params_->gat_attention(layer, k)]});
  return out;
}

layers::ClassifierVars BoundParams::classifier() const {
  return {vars_[params_->mlp_hidden_weight()], vars_[params_->mlp_hidden_bias()],
          vars_[params_->mlp_out_weight()], vars_[params_->mlp_out_bias()]};
}

}  // namespace rau::model
