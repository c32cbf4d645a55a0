#include "liftkit/simd/kernels.hpp"

#include <cmath>

namespace liftkit::simd {
namespace {

void scaled_diff(double* dst, const double* a, const double* b, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = (a[i] - b[i]) * s;
}

void scaled_diff_acc(double* dst, const double* a, const double* b, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += (a[i] - b[i]) * s;
}

void scale(double* dst, const double* a, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] * s;
}

void scale_acc(double* dst, const double* a, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += a[i] * s;
}

void extrapolate(double* dst, const double* xnew, const double* xold, double theta,
                 std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = xnew[i] + theta * (xnew[i] - xold[i]);
}

void clip_upper(double* dst, const double* bound, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = dst[i] < bound[i] ? dst[i] : bound[i];
}

void clip_nonneg(double* dst, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = dst[i] > 0.0 ? dst[i] : 0.0;
}

double max_abs(const double* a, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = std::fabs(a[i]);
    m = v > m ? v : m;
  }
  return m;
}

constexpr KernelTable kScalar{"scalar",    scaled_diff, scaled_diff_acc, scale,  scale_acc,
                              extrapolate, clip_upper,  clip_nonneg,     max_abs};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace liftkit::simd
