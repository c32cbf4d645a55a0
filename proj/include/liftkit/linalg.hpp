#pragma once

// Small dense matrix helpers for per-point tensors. Matrices are row-major
// spans of rows * cols doubles.

#include <cstddef>
#include <span>
#include <vector>

namespace liftkit::linalg {

/// Singular values in descending order (min(rows, cols) of them).
std::vector<double> singular_values(std::span<const double> m, std::size_t rows, std::size_t cols);

double spectral_norm(std::span<const double> m, std::size_t rows, std::size_t cols);
double nuclear_norm(std::span<const double> m, std::size_t rows, std::size_t cols);
double frobenius_norm(std::span<const double> m);

/// Clips the singular values of m at `radius` in place.
void clip_singular_values(std::span<double> m, std::size_t rows, std::size_t cols, double radius);

/// Eigen-decomposition of a symmetric n x n matrix (the upper triangle is
/// used after symmetrization). Eigenvalues ascending; eigenvectors stored
/// column-wise in `vectors` (row-major n x n).
void symmetric_eigen(std::span<const double> m, std::size_t n, std::span<double> values,
                     std::span<double> vectors);

}  // namespace liftkit::linalg
