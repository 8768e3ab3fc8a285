#pragma once

#include "nait/simd.hpp"

namespace nait::simd::detail {

#if defined(NAIT_HAVE_AVX2_TU)
const KernelTable& avx2_kernels();
#endif
#if defined(NAIT_HAVE_NEON_TU)
const KernelTable& neon_kernels();
#endif

}  // namespace nait::simd::detail
