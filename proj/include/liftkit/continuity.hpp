#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "liftkit/field.hpp"
#include "liftkit/grid.hpp"
#include "liftkit/lifted.hpp"

namespace liftkit {

// Index conventions (i, j: domain axes; k, l: range axes):
//   first order   E[i * s + k],                 q[i]
//   second order  E[(i * d + j) * s + k],       q[i * d + j],
//                 H[((i * s + k) * d + j) * s + l]
//   Laplacian     E[k], H[k * s + l],           q scalar

enum class ContinuityKind { FirstOrder, SecondOrder, Laplacian };

/// Shape bookkeeping for one continuity equation on a grid.
struct ContinuityOperator {
  ContinuityKind kind;
  ProductGrid grid;

  ContinuityOperator(ContinuityKind k, ProductGrid g) : kind(k), grid(std::move(g)) {}

  /// Components of the test-function field q.
  std::size_t dual_components() const;
  std::size_t momentum_components() const;
  /// Zero for the first-order equation.
  std::size_t hessian_components() const;
};

/// Parts of the adjoint coupling; H_part is empty for the first order.
struct AdjointParts {
  Field mu_part;
  Field E_part;
  Field H_part;
};

// In-place forms used by the solver. `out` (resp. the parts) must already have
// the right shape; with accumulate = true the result is added.
void residual_first_into(const Field& mu, const Field& E, const ProductGrid& grid, Field& out,
                         bool accumulate = false);
void adjoint_first_into(const Field& q, const ProductGrid& grid, Field& mu_part, Field& E_part,
                        bool accumulate = false);
void residual_second_into(const Field& mu, const Field& E, const Field& H,
                          const ProductGrid& grid, Field& out, bool accumulate = false);
void adjoint_second_into(const Field& q, const ProductGrid& grid, Field& mu_part, Field& E_part,
                         Field& H_part, bool accumulate = false);
void residual_laplace_into(const Field& mu, const Field& E, const Field& H,
                           const ProductGrid& grid, Field& out, bool accumulate = false);
void adjoint_laplace_into(const Field& q, const ProductGrid& grid, Field& mu_part, Field& E_part,
                          Field& H_part, bool accumulate = false);

/// mu_part = div_x q, E_part = grad_z q^T.
AdjointParts apply_adjoint_first(const Field& q, const ProductGrid& grid);
/// grad_x mu + div_z E (d components). Since div is the negative adjoint of
/// grad, <(mu, E), apply_adjoint_first(q)> = -<residual_first(mu, E), q>.
Field residual_first(const Field& mu, const Field& E, const ProductGrid& grid);

/// mu_part = -div_x(div_x q) (row-wise inner divergence), E_part = grad_z q,
/// H_part = hess_z q.
AdjointParts apply_adjoint_second(const Field& q, const ProductGrid& grid);
/// -grad_x^2 mu - div_z E + div_z^2 H (d x d components); the exact adjoint
/// of apply_adjoint_second. Throws RangeError if H breaks block symmetry.
Field residual_second(const Field& mu, const Field& E, const Field& H, const ProductGrid& grid,
                      bool check_symmetry = true);

/// mu_part = -laplace_x q, E_part = grad_z q, H_part = hess_z q.
AdjointParts apply_adjoint_laplace(const Field& q, const ProductGrid& grid);
/// -laplace_x mu - div_z E + div_z^2 H; the exact adjoint of
/// apply_adjoint_laplace. With check_psd, throws RangeError unless H is
/// symmetric with eigenvalues >= -1e-10 at every point.
Field residual_laplace(const Field& mu, const Field& E, const Field& H, const ProductGrid& grid,
                       bool check_psd = false);

/// Graph-concentrated solution candidates built from sampled derivatives.
struct GraphTriple {
  LiftedMeasure mu;
  MomentumField E;
  std::optional<HessianField> H;
};

/// (delta_u, grad u delta_u). `grad` holds d x s per pixel.
GraphTriple graph_triple_first(const GraphFunction& u, const Field& grad, const ProductGrid& grid);
/// (delta_u, hess u delta_u, sym(grad u (x) grad u) delta_u). `hess` holds
/// d x d x s per pixel.
GraphTriple graph_triple_second(const GraphFunction& u, const Field& grad, const Field& hess,
                                const ProductGrid& grid);
/// (delta_u, lap u delta_u, sum_i d_i u (x) d_i u delta_u). `lap` holds s per pixel.
GraphTriple graph_triple_laplace(const GraphFunction& u, const Field& grad, const Field& lap,
                                 const ProductGrid& grid);

/// Residual of a graph triple for its continuity equation.
Field graph_residual(ContinuityKind kind, const GraphTriple& triple);

/// Smooth test functions q(x, z) = b(x) g(z) per component: b is a product of
/// sin^4 bumps supported strictly inside the domain box, g a low-frequency
/// cosine in the labels. Deterministic in (count, components).
std::vector<Field> test_function_bank(const ProductGrid& grid, std::size_t components,
                                      std::size_t count);

/// Weak residual norm max_q |sum_t w R(t) . q(t)| over a test-function bank,
/// w the cell volume.
double weak_residual_norm(const Field& residual, const ProductGrid& grid,
                          const std::vector<Field>& bank);

}  // namespace liftkit
