#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rau/autodiff/params.hpp"
#include "rau/layers/layers.hpp"
#include "rau/model/config.hpp"

namespace rau::model {

/// Trainable weights of one model variant, stored as a named ParamSet:
///   gcn.r{r}.l{l}.weight          d_in x d'            (full, pa)
///   gat.l{l}.h{k}.transform       d_in x d'/heads
///   gat.l{l}.h{k}.attention       2*d'/heads x 1
///   mlp.hidden.weight / .bias     d' x d' / 1 x d'
///   mlp.out.weight / .bias        d' x 1 / 1 x 1
class ModelParams {
 public:
  ModelParams() = default;

  /// Xavier-initialised weights and zero biases, seeded from config.seed.
  static ModelParams initialize(const ModelConfig& config, std::size_t feature_dim, std::size_t n_relations);

  /// Adopts loaded tensors after checking names and shapes against the layout.
  static ModelParams adopt(ad::ParamSet tensors, const ModelConfig& config, std::size_t feature_dim,
                           std::size_t n_relations);

  ad::ParamSet& tensors() noexcept { return tensors_; }
  const ad::ParamSet& tensors() const noexcept { return tensors_; }

  std::size_t relation_count() const noexcept { return n_relations_; }
  std::size_t feature_dim() const noexcept { return feature_dim_; }
  Variant variant() const noexcept { return variant_; }

  std::size_t gcn_weight(std::size_t relation, std::size_t layer) const;
  std::size_t gat_transform(std::size_t layer, std::size_t head) const;
  std::size_t gat_attention(std::size_t layer, std::size_t head) const;
  std::size_t mlp_hidden_weight() const;
  std::size_t mlp_hidden_bias() const;
  std::size_t mlp_out_weight() const;
  std::size_t mlp_out_bias() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  ad::ParamSet tensors_;
  Variant variant_ = Variant::kFull;
  std::size_t gcn_layers_ = 0;
  std::size_t gat_layers_ = 0;
  std::size_t heads_ = 0;
  std::size_t n_relations_ = 0;
  std::size_t feature_dim_ = 0;
};

/// Vars for every parameter of a ModelParams on one tape, with typed accessors.
class BoundParams {
 public:
  BoundParams(const ModelParams& params, std::vector<ad::Var> vars);

  const std::vector<ad::Var>& all() const noexcept { return vars_; }
  ad::Var gcn_weight(std::size_t relation, std::size_t layer) const;
  std::vector<layers::GatHead> gat_heads(std::size_t layer, std::size_t heads) const;
  layers::ClassifierVars classifier() const;

 private:
  const ModelParams* params_;
  std::vector<ad::Var> vars_;
};

}  // namespace rau::model
