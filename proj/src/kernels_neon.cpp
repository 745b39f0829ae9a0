// NEON kernel variants (aarch64 only; NEON is baseline there, so no
// runtime feature check is needed).
#if defined(__aarch64__)

#include <arm_neon.h>

#include "fastimpute/kernels.hpp"

namespace fastimpute::kernels::neon {

double dot(const double* x, const double* y, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  double s = vaddvq_f64(acc0) + vaddvq_f64(acc1);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double dot_gather(const double* src, const std::int32_t* idx, const double* y,
                  std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t g = vdupq_n_f64(0.0);
    g = vsetq_lane_f64(src[idx[i]], g, 0);
    g = vsetq_lane_f64(src[idx[i + 1]], g, 1);
    acc = vfmaq_f64(acc, g, vld1q_f64(y + i));
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += src[idx[i]] * y[i];
  return s;
}

void gather(const double* src, const std::int32_t* idx, double* dst,
            std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = src[idx[i]];
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

}  // namespace fastimpute::kernels::neon

#endif  // aarch64
