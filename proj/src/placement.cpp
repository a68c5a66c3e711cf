#include "ecsim/placement.hpp"

#include <numeric>
#include <stdexcept>

namespace ecsim {

int sample_chunk_count(const FileSizeDistribution& dist, Rng& rng) { return dist.sample(rng); }

PlacementVector sample_placement(int k, int alpha_k, int m, Rng& rng) {
  if (k < 1 || m < 1) throw std::invalid_argument("placement needs k >= 1 and m >= 1");
  if (alpha_k < k) throw std::invalid_argument("placement needs alpha_k >= k");

  const int base = alpha_k / m;
  const int extra = alpha_k - m * base;
  PlacementVector a{std::vector<int>(m, base)};
  if (extra == 0) return a;

  // Partial Fisher-Yates: the first `extra` slots form a uniform subset.
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < extra; ++i) {
    const int j = std::uniform_int_distribution<int>(i, m - 1)(rng);
    std::swap(idx[i], idx[j]);
    a.blocks[idx[i]] += 1;
  }
  return a;
}

}  // namespace ecsim
