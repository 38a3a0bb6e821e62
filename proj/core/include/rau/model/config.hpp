#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace rau::model {

/// full: GCN relation fusion -> attention -> enhanced aggregator -> classifier.
/// pr:   per-relation GCN stacks replaced by summed one-hop propagation of raw features.
/// pa:   full pipeline without the enhanced aggregator.
enum class Variant { kFull, kPr, kPa };

std::string_view to_string(Variant v) noexcept;
/// Accepts "full", "pr", "pa"; throws ValidationError otherwise.
Variant parse_variant(std::string_view s);

struct ModelConfig {
  Variant variant = Variant::kFull;
  std::size_t gcn_layers = 2;
  std::size_t gat_layers = 1;
  std::size_t gat_heads = 4;
  std::size_t embed_dim = 64;
  double lr = 0.005;
  double lambda = 0.001;
  std::size_t batch_size = 256;
  std::size_t epochs = 100;
  std::uint64_t seed = 0;
  /// Neighbourhood depth for mini-batches; 0 means "cover the receptive field".
  std::size_t hop_count = 0;
  /// Stop when the epoch-mean training loss has not improved for this many
  /// epochs; 0 disables early stopping.
  std::size_t patience = 0;
  /// Per-node neighbour cap during batch expansion; 0 keeps full neighbourhoods.
  std::size_t max_neighbors = 0;

  /// Throws ValidationError on inconsistent settings.
  void validate() const;
  /// hop_count, or gcn_layers + gat_layers + 1 when unset.
  std::size_t effective_hops() const noexcept;
};

}  // namespace rau::model
