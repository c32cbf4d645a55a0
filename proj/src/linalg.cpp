#include "liftkit/linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "liftkit/error.hpp"

namespace liftkit::linalg {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_size(std::span<const double> m, std::size_t rows, std::size_t cols) {
  if (m.size() != rows * cols || rows == 0 || cols == 0) {
    throw DimensionError("linalg: matrix storage does not match its shape");
  }
}

// Closed form for 2x2 [[a, b], [c, d]].
std::pair<double, double> singular_values_2x2(double a, double b, double c, double d) {
  const double p = std::hypot(a + d, c - b);
  const double q = std::hypot(a - d, b + c);
  return {0.5 * (p + q), 0.5 * std::fabs(p - q)};
}

}  // namespace

double frobenius_norm(std::span<const double> m) {
  double s = 0.0;
  for (double v : m) s += v * v;
  return std::sqrt(s);
}

std::vector<double> singular_values(std::span<const double> m, std::size_t rows,
                                    std::size_t cols) {
  check_size(m, rows, cols);
  if (rows == 1 || cols == 1) return {frobenius_norm(m)};
  if (rows == 2 && cols == 2) {
    const auto [s1, s2] = singular_values_2x2(m[0], m[1], m[2], m[3]);
    return {s1, s2};
  }
  Eigen::Map<const RowMatrix> a(m.data(), static_cast<Eigen::Index>(rows),
                                static_cast<Eigen::Index>(cols));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  if (!sv.allFinite()) throw NumericError("linalg: SVD produced non-finite values");
  return {sv.data(), sv.data() + sv.size()};
}

double spectral_norm(std::span<const double> m, std::size_t rows, std::size_t cols) {
  return singular_values(m, rows, cols).front();
}

double nuclear_norm(std::span<const double> m, std::size_t rows, std::size_t cols) {
  double s = 0.0;
  for (double v : singular_values(m, rows, cols)) s += v;
  return s;
}

void clip_singular_values(std::span<double> m, std::size_t rows, std::size_t cols,
                          double radius) {
  check_size(m, rows, cols);
  if (rows == 1 || cols == 1) {
    const double n = frobenius_norm(m);
    if (n > radius) {
      const double f = radius / n;
      for (double& v : m) v *= f;
    }
    return;
  }
  if (rows == 2 && cols == 2) {
    // Largest singular value in closed form; fixed-size SVD only when clipping.
    const double sq = m[0] * m[0] + m[1] * m[1] + m[2] * m[2] + m[3] * m[3];
    const double det = m[0] * m[3] - m[1] * m[2];
    const double disc = std::sqrt(std::max(0.0, sq * sq - 4.0 * det * det));
    if (std::sqrt(0.5 * (sq + disc)) <= radius) return;
    Eigen::Map<Eigen::Matrix<double, 2, 2, Eigen::RowMajor>> a(m.data());
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Vector2d sv = svd.singularValues();
    if (!sv.allFinite()) throw NumericError("linalg: SVD produced non-finite values");
    sv = sv.cwiseMin(radius);
    a = svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose();
    return;
  }
  if (spectral_norm(m, rows, cols) <= radius) return;
  Eigen::Map<RowMatrix> a(m.data(), static_cast<Eigen::Index>(rows),
                          static_cast<Eigen::Index>(cols));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd sv = svd.singularValues();
  if (!sv.allFinite()) throw NumericError("linalg: SVD produced non-finite values");
  for (Eigen::Index i = 0; i < sv.size(); ++i) sv[i] = std::min(sv[i], radius);
  a = svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose();
}

void symmetric_eigen(std::span<const double> m, std::size_t n, std::span<double> values,
                     std::span<double> vectors) {
  check_size(m, n, n);
  if (values.size() != n || vectors.size() != n * n) {
    throw DimensionError("linalg: eigen output storage does not match n");
  }
  if (n == 1) {
    values[0] = m[0];
    vectors[0] = 1.0;
    return;
  }
  if (n == 2) {
    const double a = m[0];
    const double b = 0.5 * (m[1] + m[2]);
    const double c = m[3];
    const double mean = 0.5 * (a + c);
    const double r = std::hypot(0.5 * (a - c), b);
    values[0] = mean - r;
    values[1] = mean + r;
    if (b == 0.0) {
      // Already diagonal: keep axis-aligned eigenvectors in ascending order.
      const bool swap = a > c;
      vectors[0] = swap ? 0.0 : 1.0;
      vectors[2] = swap ? 1.0 : 0.0;
      vectors[1] = swap ? 1.0 : 0.0;
      vectors[3] = swap ? 0.0 : 1.0;
      return;
    }
    // Eigenvector for the larger eigenvalue: (b, lambda_max - a), normalized.
    // Use whichever of the two equivalent forms is better conditioned.
    double vx, vy;
    if (values[1] - a > values[1] - c) {
      vx = b;
      vy = values[1] - a;
    } else {
      vx = values[1] - c;
      vy = b;
    }
    const double nv = std::hypot(vx, vy);
    vx /= nv;
    vy /= nv;
    // Columns: [v_min, v_max], v_min orthogonal to v_max.
    vectors[0] = -vy;
    vectors[2] = vx;
    vectors[1] = vx;
    vectors[3] = vy;
    return;
  }
  RowMatrix a = Eigen::Map<const RowMatrix>(m.data(), static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
  const RowMatrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) throw NumericError("linalg: symmetric eigensolver failed");
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = es.eigenvalues()[static_cast<Eigen::Index>(i)];
    for (std::size_t j = 0; j < n; ++j) {
      vectors[j * n + i] = es.eigenvectors()(static_cast<Eigen::Index>(j),
                                             static_cast<Eigen::Index>(i));
    }
  }
}

}  // namespace liftkit::linalg
