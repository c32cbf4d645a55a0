#include "liftkit/simd/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace liftkit::simd {
namespace {

// Two doubles per register; same tail handling as the AVX2 variant.

void scaled_diff(double* dst, const double* a, const double* b, double s, std::size_t n) {
  const float64x2_t vs = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(dst + i, vmulq_f64(vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i)), vs));
  for (; i < n; ++i) dst[i] = (a[i] - b[i]) * s;
}

void scaled_diff_acc(double* dst, const double* a, const double* b, double s, std::size_t n) {
  const float64x2_t vs = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t p = vmulq_f64(vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i)), vs);
    vst1q_f64(dst + i, vaddq_f64(vld1q_f64(dst + i), p));
  }
  for (; i < n; ++i) dst[i] += (a[i] - b[i]) * s;
}

void scale(double* dst, const double* a, double s, std::size_t n) {
  const float64x2_t vs = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(dst + i, vmulq_f64(vld1q_f64(a + i), vs));
  for (; i < n; ++i) dst[i] = a[i] * s;
}

void scale_acc(double* dst, const double* a, double s, std::size_t n) {
  const float64x2_t vs = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(dst + i, vaddq_f64(vld1q_f64(dst + i), vmulq_f64(vld1q_f64(a + i), vs)));
  for (; i < n; ++i) dst[i] += a[i] * s;
}

void extrapolate(double* dst, const double* xnew, const double* xold, double theta, std::size_t n) {
  const float64x2_t vt = vdupq_n_f64(theta);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t xn = vld1q_f64(xnew + i);
    vst1q_f64(dst + i, vaddq_f64(xn, vmulq_f64(vt, vsubq_f64(xn, vld1q_f64(xold + i)))));
  }
  for (; i < n; ++i) dst[i] = xnew[i] + theta * (xnew[i] - xold[i]);
}

// vminq/vmaxq differ from the scalar select on NaN inputs, so use compare+select.
void clip_upper(double* dst, const double* bound, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t a = vld1q_f64(dst + i);
    const float64x2_t b = vld1q_f64(bound + i);
    vst1q_f64(dst + i, vbslq_f64(vcltq_f64(a, b), a, b));
  }
  for (; i < n; ++i) dst[i] = dst[i] < bound[i] ? dst[i] : bound[i];
}

void clip_nonneg(double* dst, std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t a = vld1q_f64(dst + i);
    vst1q_f64(dst + i, vbslq_f64(vcgtq_f64(a, zero), a, zero));
  }
  for (; i < n; ++i) dst[i] = dst[i] > 0.0 ? dst[i] : 0.0;
}

double max_abs(const double* a, std::size_t n) {
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vabsq_f64(vld1q_f64(a + i));
    m = vbslq_f64(vcgtq_f64(v, m), v, m);
  }
  double r = vgetq_lane_f64(m, 0);
  const double r1 = vgetq_lane_f64(m, 1);
  r = r1 > r ? r1 : r;
  for (; i < n; ++i) {
    const double v = a[i] < 0.0 ? -a[i] : a[i];
    r = v > r ? v : r;
  }
  return r;
}

constexpr KernelTable kNeon{"neon",      scaled_diff, scaled_diff_acc, scale,  scale_acc,
                            extrapolate, clip_upper,  clip_nonneg,     max_abs};

}  // namespace

const KernelTable* neon_kernels() { return &kNeon; }

}  // namespace liftkit::simd

#else

namespace liftkit::simd {
const KernelTable* neon_kernels() { return nullptr; }
}  // namespace liftkit::simd

#endif
