#include "rau/model/config.hpp"

#include <cmath>

#include "rau/error.hpp"

namespace rau::model {

std::string_view to_string(Variant v) noexcept {
  switch (v) {
    case Variant::kFull: return "full";
    case Variant::kPr: return "pr";
    case Variant::kPa: return "pa";
  }
  return "full";
}

Variant parse_variant(std::string_view s) {
  if (s == "full") return Variant::kFull;
  if (s == "pr") return Variant::kPr;
  if (s == "pa") return Variant::kPa;
  throw ValidationError("unknown variant '" + std::string(s) + "' (expected full, pr or pa)");
}

void ModelConfig::validate() const {
  if (gcn_layers == 0 && variant != Variant::kPr) throw ValidationError("config: gcn_layers must be >= 1");
  if (gat_layers == 0) throw ValidationError("config: gat_layers must be >= 1");
  if (gat_heads == 0) throw ValidationError("config: gat_heads must be >= 1");
  if (embed_dim == 0) throw ValidationError("config: embed_dim must be >= 1");
  if (embed_dim % gat_heads != 0)
    throw ValidationError("config: embed_dim " + std::to_string(embed_dim) + " is not divisible by gat_heads " +
                          std::to_string(gat_heads));
  if (batch_size == 0) throw ValidationError("config: batch_size must be >= 1");
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ValidationError("config: lr must be >= 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("config: lambda must be >= 0");
}

std::size_t ModelConfig::effective_hops() const noexcept {
  return hop_count > 0 ? hop_count : gcn_layers + gat_layers + 1;
}

}  // namespace rau::model
