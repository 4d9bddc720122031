#pragma once

#include <filesystem>

#include "cdprune/mask.hpp"
#include "cdprune/nn.hpp"

namespace cdprune {

struct Checkpoint {
  Network network;
  PruneMask mask;
};

/// Writes {layer_dims, seed, round, surviving, layers: [{W, b, W0, mask}]} as
/// JSON. Doubles are emitted in shortest round-trip form.
void save_checkpoint(const Network& net, const PruneMask& mask, const std::filesystem::path& path);

Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace cdprune
