#pragma once

// Data-parallel inner loops of the workload recursion. Each instruction set
// provides the same table; dispatch picks one at runtime.

#include <span>

namespace ecsim::kernels {

struct KernelTable {
  const char* name;

  /// w[i] = max(w[i] + chunk * s[i] - drain, 0).
  void (*advance)(std::span<double> w, std::span<const int> s, double chunk, double drain);

  /// w[i] = max(w[i] - drain, 0).
  void (*drain)(std::span<double> w, double drain);

  /// max over {i : s[i] > 0} of w[i] + chunk * s[i]; -inf when s is all zero.
  double (*request_max)(std::span<const double> w, std::span<const int> s, double chunk);

  /// Sum of entries. Summation order is variant-specific.
  double (*total)(std::span<const double> w);
};

const KernelTable& scalar();

/// nullptr when the variant is not compiled in or the CPU lacks support.
const KernelTable* avx2();
const KernelTable* neon();

/// Best supported variant; ECSIM_KERNEL=scalar|avx2|neon overrides.
const KernelTable& active();

}  // namespace ecsim::kernels
