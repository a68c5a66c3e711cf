#include <cstdlib>
#include <string_view>

#include "kernels_internal.hpp"

namespace ecsim::kernels {

const KernelTable* avx2() {
#if defined(ECSIM_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon() {
#if defined(ECSIM_HAVE_NEON)
  return &detail::neon_table();
#else
  return nullptr;
#endif
}

namespace {

const KernelTable& choose() {
  if (const char* env = std::getenv("ECSIM_KERNEL")) {
    const std::string_view want(env);
    if (want == "scalar") return scalar();
    if (want == "avx2" && avx2()) return *avx2();
    if (want == "neon" && neon()) return *neon();
  }
  if (const auto* t = avx2()) return *t;
  if (const auto* t = neon()) return *t;
  return scalar();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = choose();
  return table;
}

}  // namespace ecsim::kernels
