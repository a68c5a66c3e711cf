#pragma once

#include "ecsim/kernels.hpp"

namespace ecsim::kernels::detail {

#if defined(ECSIM_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(ECSIM_HAVE_NEON)
const KernelTable& neon_table();
#endif

}  // namespace ecsim::kernels::detail
