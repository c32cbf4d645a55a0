#pragma once

// Slow, independent reference solvers. None of these call into the prox or
// linalg modules, so they can serve as oracles for them.

#include <cstddef>
#include <span>
#include <vector>

namespace liftkit::oracle {

/// Cyclic Jacobi eigen-solver for a small symmetric matrix (row-major n x n).
/// Eigenvalues ascending; eigenvectors column-wise.
void jacobi_eigen(std::span<const double> m, std::size_t n, std::vector<double>& values,
                  std::vector<double>& vectors);

/// Halfspace {x : <a, x> <= b}.
struct Halfspace {
  std::vector<double> a;
  double b = 0.0;
};

/// Euclidean projection of p onto an intersection of halfspaces by dual
/// coordinate ascent (Hildreth). Returns the projected point.
std::vector<double> project_polyhedron(std::span<const double> p,
                                       const std::vector<Halfspace>& cuts,
                                       std::size_t max_sweeps = 200000, double tol = 1e-15);

/// Simplex projection by enumerating every support set.
std::vector<double> simplex(std::span<const double> v, double mass);

/// Spectral-ball projection by cutting planes <u v^T, X> <= r.
std::vector<double> spectral_ball(std::span<const double> m, std::size_t rows, std::size_t cols,
                                  double radius);

/// PSD projection (input symmetrized) by cutting planes <-u u^T, X> <= 0.
std::vector<double> psd(std::span<const double> m, std::size_t n);

/// Projection onto {c/2 |xi|^2 + lam <= 0}: multistart Newton over the full
/// boundary parametrization xi' -> (xi', -c/2 |xi'|^2). Output layout (xi, lam).
std::vector<double> quad_epigraph(std::span<const double> xi, double lam, double curvature);

/// Projection onto {a = b + c} via two opposing halfspaces.
std::vector<double> equality(double a, double b, double c);

/// Minimizer of sum_i (u_i - g_i)^2 + kappa * sum_i |u_{i+1} - u_i|, by
/// accelerated projected gradient on the box-constrained dual.
std::vector<double> tv_l2_1d(std::span<const double> g, double kappa,
                             std::size_t iters = 200000);

}  // namespace liftkit::oracle
