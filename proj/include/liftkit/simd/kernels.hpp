#pragma once

// Elementwise double-precision kernels behind the finite-difference operators
// and the primal-dual update loops.
//
// Every kernel has a scalar reference implementation and vectorized variants
// (AVX2 on x86-64, NEON on AArch64). All kernels are elementwise without
// fused multiply-add, so every variant produces bit-identical results; the
// equivalence tests rely on that.

#include <cstddef>
#include <string_view>

namespace liftkit::simd {

struct KernelTable {
  const char* name;
  // dst[i] = (a[i] - b[i]) * s
  void (*scaled_diff)(double* dst, const double* a, const double* b, double s, std::size_t n);
  // dst[i] += (a[i] - b[i]) * s
  void (*scaled_diff_acc)(double* dst, const double* a, const double* b, double s, std::size_t n);
  // dst[i] = a[i] * s
  void (*scale)(double* dst, const double* a, double s, std::size_t n);
  // dst[i] += a[i] * s
  void (*scale_acc)(double* dst, const double* a, double s, std::size_t n);
  // dst[i] = xnew[i] + theta * (xnew[i] - xold[i])
  void (*extrapolate)(double* dst, const double* xnew, const double* xold, double theta,
                      std::size_t n);
  // dst[i] = dst[i] < bound[i] ? dst[i] : bound[i]
  void (*clip_upper)(double* dst, const double* bound, std::size_t n);
  // dst[i] = dst[i] > 0 ? dst[i] : 0
  void (*clip_nonneg)(double* dst, std::size_t n);
  // max_i |a[i]|  (order independent, hence exact across variants)
  double (*max_abs)(const double* a, std::size_t n);
};

const KernelTable& scalar_kernels();

/// Vectorized table for this build, or nullptr if none was compiled in.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

/// Kernels chosen at runtime: the best variant the CPU supports, unless
/// LIFTKIT_SIMD=scalar (or =avx2 / =neon) overrides the choice.
const KernelTable& active();

/// Forces a variant by name ("scalar", "avx2", "neon", "auto"). Returns false
/// if the variant is unavailable on this machine; the selection is unchanged.
bool select(std::string_view name);

bool cpu_has_avx2();

}  // namespace liftkit::simd
