#pragma once

#include "ecsim/core.hpp"

namespace ecsim {

/// Draws kappa_n from the file-size pmf.
int sample_chunk_count(const FileSizeDistribution& dist, Rng& rng);

/// Spreads alpha_k blocks over m servers: floor(alpha_k / m) everywhere, plus
/// one more block on a uniformly random subset of alpha_k mod m servers.
PlacementVector sample_placement(int k, int alpha_k, int m, Rng& rng);

}  // namespace ecsim
