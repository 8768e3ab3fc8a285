#include "simd/kernels_internal.hpp"

namespace nait::simd {
namespace {

double squared_l2_scalar(const float* a, const float* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum += d * d;
  }
  return sum;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void intertrace_scalar(double* returns, double* discounts, double* targets, std::size_t n,
                       double reward, double gamma, double q_next) {
  for (std::size_t i = 0; i < n; ++i) {
    returns[i] += discounts[i] * reward;
    discounts[i] *= gamma;
    targets[i] = returns[i] + discounts[i] * q_next;
  }
}

constexpr KernelTable kScalar{Backend::scalar, "scalar", squared_l2_scalar, dot_scalar,
                              axpy_scalar, intertrace_scalar};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace nait::simd
