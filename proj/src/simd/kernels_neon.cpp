#include <arm_neon.h>

#include "simd/kernels_internal.hpp"

namespace nait::simd::detail {
namespace {

double squared_l2_neon(const float* a, const float* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t va = vld1q_f32(a + i);
    const float32x4_t vb = vld1q_f32(b + i);
    const float64x2_t d0 = vsubq_f64(vcvt_f64_f32(vget_low_f32(va)), vcvt_f64_f32(vget_low_f32(vb)));
    const float64x2_t d1 = vsubq_f64(vcvt_high_f64_f32(va), vcvt_high_f64_f32(vb));
    acc0 = vfmaq_f64(acc0, d0, d0);
    acc1 = vfmaq_f64(acc1, d1, d1);
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum += d * d;
  }
  return sum;
}

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void intertrace_neon(double* returns, double* discounts, double* targets, std::size_t n,
                     double reward, double gamma, double q_next) {
  const float64x2_t vr = vdupq_n_f64(reward);
  const float64x2_t vg = vdupq_n_f64(gamma);
  const float64x2_t vq = vdupq_n_f64(q_next);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t disc = vld1q_f64(discounts + i);
    const float64x2_t ret = vfmaq_f64(vld1q_f64(returns + i), disc, vr);
    disc = vmulq_f64(disc, vg);
    vst1q_f64(returns + i, ret);
    vst1q_f64(discounts + i, disc);
    vst1q_f64(targets + i, vfmaq_f64(ret, disc, vq));
  }
  for (; i < n; ++i) {
    returns[i] += discounts[i] * reward;
    discounts[i] *= gamma;
    targets[i] = returns[i] + discounts[i] * q_next;
  }
}

constexpr KernelTable kNeon{Backend::neon, "neon", squared_l2_neon, dot_neon, axpy_neon,
                            intertrace_neon};

}  // namespace

const KernelTable& neon_kernels() { return kNeon; }

}  // namespace nait::simd::detail
