#pragma once

// Data-parallel inner loops used by the index, the encoders and the trace
// update. Every kernel has a scalar reference implementation; vector variants
// (AVX2+FMA on x86-64, NEON on aarch64) are selected once at startup from the
// CPU feature set and can be overridden with NAIT_SIMD=scalar|avx2|neon or
// set_backend().

#include <cstddef>
#include <span>
#include <string_view>

namespace nait::simd {

enum class Backend { scalar, avx2, neon };

struct KernelTable {
  Backend backend;
  const char* name;
  // Sum of squared differences; float inputs widened to double before subtracting.
  double (*squared_l2_f32)(const float* a, const float* b, std::size_t n);
  double (*dot_f64)(const double* a, const double* b, std::size_t n);
  // y += a * x
  void (*axpy_f64)(double a, const double* x, double* y, std::size_t n);
  // Fused inter-trace pass: G += Gamma*r; Gamma *= gamma; Q = G + Gamma*q_next.
  void (*intertrace_f64)(double* returns, double* discounts, double* targets, std::size_t n,
                         double reward, double gamma, double q_next);
};

const KernelTable& scalar_kernels();
bool backend_available(Backend b);
// Throws ConfigError if the backend is not compiled in or unsupported by the CPU.
const KernelTable& kernels_for(Backend b);

const KernelTable& active();
void set_backend(Backend b);
Backend parse_backend(std::string_view name);
std::string_view backend_name(Backend b);

inline double squared_l2(std::span<const float> a, std::span<const float> b) {
  return active().squared_l2_f32(a.data(), b.data(), a.size());
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot_f64(a.data(), b.data(), a.size());
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy_f64(a, x.data(), y.data(), x.size());
}

}  // namespace nait::simd
