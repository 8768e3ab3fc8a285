#include <atomic>
#include <cstdlib>
#include <string>

#include "nait/error.hpp"
#include "simd/kernels_internal.hpp"

namespace nait::simd {
namespace {

bool cpu_has_avx2() {
#if defined(NAIT_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* best_available() {
  if (const char* env = std::getenv("NAIT_SIMD"); env != nullptr && *env != '\0') {
    return &kernels_for(parse_backend(env));
  }
  if (backend_available(Backend::avx2)) return &kernels_for(Backend::avx2);
  if (backend_available(Backend::neon)) return &kernels_for(Backend::neon);
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{best_available()};
  return slot;
}

}  // namespace

bool backend_available(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
      return cpu_has_avx2();
    case Backend::neon:
#if defined(NAIT_HAVE_NEON_TU)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Backend b) {
  if (!backend_available(b)) {
    throw ConfigError("SIMD backend '" + std::string(backend_name(b)) + "' is not available");
  }
  switch (b) {
#if defined(NAIT_HAVE_AVX2_TU)
    case Backend::avx2:
      return detail::avx2_kernels();
#endif
#if defined(NAIT_HAVE_NEON_TU)
    case Backend::neon:
      return detail::neon_kernels();
#endif
    default:
      return scalar_kernels();
  }
}

const KernelTable& active() { return *active_slot().load(std::memory_order_acquire); }

void set_backend(Backend b) { active_slot().store(&kernels_for(b), std::memory_order_release); }

Backend parse_backend(std::string_view name) {
  if (name == "scalar") return Backend::scalar;
  if (name == "avx2") return Backend::avx2;
  if (name == "neon") return Backend::neon;
  throw ConfigError("unknown SIMD backend '" + std::string(name) + "'");
}

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "unknown";
}

}  // namespace nait::simd
