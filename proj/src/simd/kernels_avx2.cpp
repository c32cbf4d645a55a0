#include "liftkit/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

#define LIFTKIT_AVX2 __attribute__((target("avx2")))

namespace liftkit::simd {
namespace {

// Four doubles per register. Tails fall back to the same scalar expression so
// results match the reference bit for bit.

LIFTKIT_AVX2 void scaled_diff(double* dst, const double* a, const double* b, double s,
                              std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(dst + i, _mm256_mul_pd(d, vs));
  }
  for (; i < n; ++i) dst[i] = (a[i] - b[i]) * s;
}

LIFTKIT_AVX2 void scaled_diff_acc(double* dst, const double* a, const double* b, double s,
                                  std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(dst + i), _mm256_mul_pd(d, vs)));
  }
  for (; i < n; ++i) dst[i] += (a[i] - b[i]) * s;
}

LIFTKIT_AVX2 void scale(double* dst, const double* a, double s, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(dst + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), vs));
  for (; i < n; ++i) dst[i] = a[i] * s;
}

LIFTKIT_AVX2 void scale_acc(double* dst, const double* a, double s, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d p = _mm256_mul_pd(_mm256_loadu_pd(a + i), vs);
    _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(dst + i), p));
  }
  for (; i < n; ++i) dst[i] += a[i] * s;
}

LIFTKIT_AVX2 void extrapolate(double* dst, const double* xnew, const double* xold, double theta,
                              std::size_t n) {
  const __m256d vt = _mm256_set1_pd(theta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xn = _mm256_loadu_pd(xnew + i);
    const __m256d d = _mm256_sub_pd(xn, _mm256_loadu_pd(xold + i));
    _mm256_storeu_pd(dst + i, _mm256_add_pd(xn, _mm256_mul_pd(vt, d)));
  }
  for (; i < n; ++i) dst[i] = xnew[i] + theta * (xnew[i] - xold[i]);
}

LIFTKIT_AVX2 void clip_upper(double* dst, const double* bound, std::size_t n) {
  std::size_t i = 0;
  // _mm256_min_pd(a, b) returns a < b ? a : b, the scalar expression below.
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(dst + i, _mm256_min_pd(_mm256_loadu_pd(dst + i), _mm256_loadu_pd(bound + i)));
  }
  for (; i < n; ++i) dst[i] = dst[i] < bound[i] ? dst[i] : bound[i];
}

LIFTKIT_AVX2 void clip_nonneg(double* dst, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(dst + i, _mm256_max_pd(_mm256_loadu_pd(dst + i), zero));
  for (; i < n; ++i) dst[i] = dst[i] > 0.0 ? dst[i] : 0.0;
}

LIFTKIT_AVX2 double max_abs(const double* a, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(_mm256_andnot_pd(sign, _mm256_loadu_pd(a + i)), m);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = 0.0;
  for (double v : lanes) r = v > r ? v : r;
  for (; i < n; ++i) {
    const double v = a[i] < 0.0 ? -a[i] : a[i];
    r = v > r ? v : r;
  }
  return r;
}

constexpr KernelTable kAvx2{"avx2",      scaled_diff, scaled_diff_acc, scale,  scale_acc,
                            extrapolate, clip_upper,  clip_nonneg,     max_abs};

}  // namespace

const KernelTable* avx2_kernels() { return &kAvx2; }

}  // namespace liftkit::simd

#else

namespace liftkit::simd {
const KernelTable* avx2_kernels() { return nullptr; }
}  // namespace liftkit::simd

#endif
