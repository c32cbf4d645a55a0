#include "liftkit/continuity.hpp"

#include <cmath>
#include <numbers>

#include "liftkit/error.hpp"
#include "liftkit/simd/kernels.hpp"

namespace liftkit {
namespace {

// out = s * tmp, or out += s * tmp.
void put(std::span<double> out, std::span<const double> tmp, double s, bool accumulate) {
  const auto& k = simd::active();
  if (accumulate) {
    k.scale_acc(out.data(), tmp.data(), s, out.size());
  } else {
    k.scale(out.data(), tmp.data(), s, out.size());
  }
}

void check_second(const ProductGrid& grid, const Field& mu, const Field& E, const Field& H) {
  const std::size_t d = grid.domain_dims();
  const std::size_t s = grid.range_dims();
  check_shape(mu, grid, 1, "residual_second mu");
  check_shape(E, grid, d * d * s, "residual_second E");
  check_shape(H, grid, d * s * d * s, "residual_second H");
}

void check_laplace(const ProductGrid& grid, const Field& mu, const Field& E, const Field& H) {
  const std::size_t s = grid.range_dims();
  check_shape(mu, grid, 1, "residual_laplace mu");
  check_shape(E, grid, s, "residual_laplace E");
  check_shape(H, grid, s * s, "residual_laplace H");
}

}  // namespace

std::size_t ContinuityOperator::dual_components() const {
  const std::size_t d = grid.domain_dims();
  switch (kind) {
    case ContinuityKind::FirstOrder: return d;
    case ContinuityKind::SecondOrder: return d * d;
    case ContinuityKind::Laplacian: return 1;
  }
  return 0;
}

std::size_t ContinuityOperator::momentum_components() const {
  const std::size_t d = grid.domain_dims();
  const std::size_t s = grid.range_dims();
  switch (kind) {
    case ContinuityKind::FirstOrder: return d * s;
    case ContinuityKind::SecondOrder: return d * d * s;
    case ContinuityKind::Laplacian: return s;
  }
  return 0;
}

std::size_t ContinuityOperator::hessian_components() const {
  const std::size_t d = grid.domain_dims();
  const std::size_t s = grid.range_dims();
  switch (kind) {
    case ContinuityKind::FirstOrder: return 0;
    case ContinuityKind::SecondOrder: return d * s * d * s;
    case ContinuityKind::Laplacian: return s * s;
  }
  return 0;
}

void residual_first_into(const Field& mu, const Field& E, const ProductGrid& grid, Field& out,
                         bool accumulate) {
  const std::size_t d = grid.domain_dims();
  const std::size_t s = grid.range_dims();
  check_shape(mu, grid, 1, "residual_first mu");
  check_shape(E, grid, d * s, "residual_first E");
  check_shape(out, grid, d, "residual_first out");
  for (std::size_t i = 0; i < d; ++i) {
    forward_diff(mu.component(0), out.component(i), grid, i, accumulate);
    for (std::size_t k = 0; k < s; ++k) {
      backward_div(E.component(i * s + k), out.component(i), grid, d + k, true);
    }
  }
}

void adjoint_first_into(const Field& q, const ProductGrid& grid, Field& mu_part, Field& E_part,
                        bool accumulate) {
  const std::size_t d = grid.domain_dims();
  const std::size_t s = grid.range_dims();
  check_shape(q, grid, d, "apply_adjoint_first q");
  check_shape(mu_part, grid, 1, "apply_adjoint_first mu_part");
  check_shape(E_part, grid, d * s, "apply_adjoint_first E_part");
  for (std::size_t i = 0; i < d; ++i) {
    backward_div(q.component(i), mu_part.component(0), grid, i, accumulate || i > 0);
    for (std::size_t k = 0; k < s; ++k) {
      forward_diff(q.component(i), E_part.component(i * s + k), grid, d + k, accumulate);
    }
  }
}

void residual_second_into(const Field& mu, const Field& E, const Field& H,
                          const ProductGrid& grid, Field& out, bool accumulate) {
  const std::size_t d = grid.domain_dims();
  const std::size_t s = grid.range_dims();
  check_second(grid, mu, E, H);
  check_shape(out, grid, d * d, "residual_second out");
  std::vector<double> t1(grid.num_points()), t2(grid.num_points());
  for (std::size_t i = 0; i < d; ++i) {
    forward_diff(mu.component(0), t1, grid, i);
    for (std::size_t j = 0; j < d; ++j) {
      auto o = out.component(i * d + j);
      forward_diff(t1, t2, grid, j);
      put(o, t2, -1.0, accumulate);
      for (std::size_t k = 0; k < s; ++k) {
        backward_div(E.component((i * d + j) * s + k), t2, grid, d + k);
        put(o, t2, -1.0, true);
      }
      for (std::size_t k = 0; k < s; ++k) {
        for (std::size_t l = 0; l < s; ++l) {
          hess_z_entry(H.component(((i * s + k) * d + j) * s + l), o, t2, grid, k, l, true);
        }
      }
    }
  }
}

void adjoint_second_into(const Field& q, const ProductGrid& grid, Field& mu_part, Field& E_part,
                         Field& H_part, bool accumulate) {
  const std::size_t d = grid.domain_dims();
  const std::size_t s = grid.range_dims();
  check_shape(q, grid, d * d, "apply_adjoint_second q");
  check_second(grid, mu_part, E_part, H_part);
  std::vector<double> inner(grid.num_points()), outer(grid.num_points()), t(grid.num_points());
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      backward_div(q.component(i * d + j), inner, grid, j, j > 0);
    }
    backward_div(inner, outer, grid, i, i > 0);
  }
  put(mu_part.component(0), outer, -1.0, accumulate);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const auto qij = q.component(i * d + j);
      for (std::size_t k = 0; k < s; ++k) {
        forward_diff(qij, E_part.component((i * d + j) * s + k), grid, d + k, accumulate);
        for (std::size_t l = 0; l < s; ++l) {
          hess_z_entry(qij, H_part.component(((i * s + k) * d + j) * s + l), t, grid, k, l,
                       accumulate);
        }
      }
    }
  }
}

void residual_laplace_into(const Field& mu, const Field& E, const Field& H,
                           const ProductGrid& grid, Field& out, bool accumulate) {
  const std::size_t d = grid.domain_dims();
  const std::size_t s = grid.range_dims();
  check_laplace(grid, mu, E, H);
  check_shape(out, grid, 1, "residual_laplace out");
  std::vector<double> t(grid.num_points()), lap(grid.num_points());
  for (std::size_t i = 0; i < d; ++i) {
    forward_diff(mu.component(0), t, grid, i);
    backward_div(t, lap, grid, i, i > 0);
  }
  auto o = out.component(0);
  put(o, lap, -1.0, accumulate);
  for (std::size_t k = 0; k < s; ++k) {
    backward_div(E.component(k), t, grid, d + k);
    put(o, t, -1.0, true);
  }
  for (std::size_t k = 0; k < s; ++k) {
    for (std::size_t l = 0; l < s; ++l) {
      hess_z_entry(H.component(k * s + l), o, t, grid, k, l, true);
    }
  }
}

void adjoint_laplace_into(const Field& q, const ProductGrid& grid, Field& mu_part, Field& E_part,
                          Field& H_part, bool accumulate) {
  const std::size_t d = grid.domain_dims();
  const std::size_t s = grid.range_dims();
  check_shape(q, grid, 1, "apply_adjoint_laplace q");
  check_laplace(grid, mu_part, E_part, H_part);
  std::vector<double> t(grid.num_points()), lap(grid.num_points());
  const auto q0 = q.component(0);
  for (std::size_t i = 0; i < d; ++i) {
    forward_diff(q0, t, grid, i);
    backward_div(t, lap, grid, i, i > 0);
  }
  put(mu_part.component(0), lap, -1.0, accumulate);
  for (std::size_t k = 0; k < s; ++k) {
    forward_diff(q0, E_part.component(k), grid, d + k, accumulate);
    for (std::size_t l = 0; l < s; ++l) {
      hess_z_entry(q0, H_part.component(k * s + l), t, grid, k, l, accumulate);
    }
  }
}

AdjointParts apply_adjoint_first(const Field& q, const ProductGrid& grid) {
  AdjointParts parts{grid.scalar_field(), grid.field(grid.domain_dims() * grid.range_dims()), {}};
  adjoint_first_into(q, grid, parts.mu_part, parts.E_part);
  return parts;
}

Field residual_first(const Field& mu, const Field& E, const ProductGrid& grid) {
  Field out = grid.field(grid.domain_dims());
  residual_first_into(mu, E, grid, out);
  return out;
}

AdjointParts apply_adjoint_second(const Field& q, const ProductGrid& grid) {
  const std::size_t d = grid.domain_dims();
  const std::size_t s = grid.range_dims();
  AdjointParts parts{grid.scalar_field(), grid.field(d * d * s), grid.field(d * s * d * s)};
  adjoint_second_into(q, grid, parts.mu_part, parts.E_part, parts.H_part);
  return parts;
}

Field residual_second(const Field& mu, const Field& E, const Field& H, const ProductGrid& grid,
                      bool check_symmetry) {
  check_second(grid, mu, E, H);
  if (check_symmetry &&
      !HessianField(grid, HessianField::Layout::Full, H).block_symmetric(1e-12)) {
    throw RangeError("residual_second: H violates block symmetry");
  }
  const std::size_t d = grid.domain_dims();
  Field out = grid.field(d * d);
  residual_second_into(mu, E, H, grid, out);
  return out;
}

AdjointParts apply_adjoint_laplace(const Field& q, const ProductGrid& grid) {
  const std::size_t s = grid.range_dims();
  AdjointParts parts{grid.scalar_field(), grid.field(s), grid.field(s * s)};
  adjoint_laplace_into(q, grid, parts.mu_part, parts.E_part, parts.H_part);
  return parts;
}

Field residual_laplace(const Field& mu, const Field& E, const Field& H, const ProductGrid& grid,
                       bool check_psd) {
  check_laplace(grid, mu, E, H);
  if (check_psd && !HessianField(grid, HessianField::Layout::Laplacian, H).symmetric_psd(1e-10)) {
    throw RangeError("residual_laplace: H is not symmetric positive semidefinite");
  }
  Field out = grid.scalar_field();
  residual_laplace_into(mu, E, H, grid, out);
  return out;
}

GraphTriple graph_triple_first(const GraphFunction& u, const Field& grad,
                               const ProductGrid& grid) {
  const std::size_t d = grid.domain_dims();
  const std::size_t s = grid.range_dims();
  return {lift_graph(u, grid), lift_momentum(u, grad, {d, s}, grid), std::nullopt};
}

GraphTriple graph_triple_second(const GraphFunction& u, const Field& grad, const Field& hess,
                                const ProductGrid& grid) {
  const std::size_t d = grid.domain_dims();
  const std::size_t s = grid.range_dims();
  if (grad.points() != grid.num_pixels() || grad.components() != d * s) {
    throw DimensionError("graph_triple_second: grad must be d x s per pixel");
  }
  Field a(grid.num_pixels(), d * s * d * s);
  for (std::size_t x = 0; x < grid.num_pixels(); ++x) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t k = 0; k < s; ++k) {
        for (std::size_t j = 0; j < d; ++j) {
          for (std::size_t l = 0; l < s; ++l) {
            a(((i * s + k) * d + j) * s + l, x) =
                0.5 * (grad(i * s + k, x) * grad(j * s + l, x) +
                       grad(i * s + l, x) * grad(j * s + k, x));
          }
        }
      }
    }
  }
  auto H = lift_momentum(u, a, {d, s, d, s}, grid);
  return {lift_graph(u, grid), lift_momentum(u, hess, {d, d, s}, grid),
          HessianField(grid, HessianField::Layout::Full, std::move(H.values))};
}

GraphTriple graph_triple_laplace(const GraphFunction& u, const Field& grad, const Field& lap,
                                 const ProductGrid& grid) {
  const std::size_t d = grid.domain_dims();
  const std::size_t s = grid.range_dims();
  if (grad.points() != grid.num_pixels() || grad.components() != d * s) {
    throw DimensionError("graph_triple_laplace: grad must be d x s per pixel");
  }
  Field a(grid.num_pixels(), s * s);
  for (std::size_t x = 0; x < grid.num_pixels(); ++x) {
    for (std::size_t k = 0; k < s; ++k) {
      for (std::size_t l = 0; l < s; ++l) {
        double v = 0.0;
        for (std::size_t i = 0; i < d; ++i) v += grad(i * s + k, x) * grad(i * s + l, x);
        a(k * s + l, x) = v;
      }
    }
  }
  auto H = lift_momentum(u, a, {s, s}, grid);
  return {lift_graph(u, grid), lift_momentum(u, lap, {s}, grid),
          HessianField(grid, HessianField::Layout::Laplacian, std::move(H.values))};
}

Field graph_residual(ContinuityKind kind, const GraphTriple& t) {
  const ProductGrid& grid = t.mu.grid;
  switch (kind) {
    case ContinuityKind::FirstOrder:
      return residual_first(t.mu.values, t.E.values, grid);
    case ContinuityKind::SecondOrder:
      if (!t.H) throw DimensionError("graph_residual: second order needs H");
      return residual_second(t.mu.values, t.E.values, t.H->values, grid);
    case ContinuityKind::Laplacian:
      if (!t.H) throw DimensionError("graph_residual: Laplacian needs H");
      return residual_laplace(t.mu.values, t.E.values, t.H->values, grid);
  }
  throw DimensionError("graph_residual: unknown kind");
}

std::vector<Field> test_function_bank(const ProductGrid& grid, std::size_t components,
                                      std::size_t count) {
  const std::size_t d = grid.domain_dims();
  const std::size_t s = grid.range_dims();
  const double pi = std::numbers::pi;
  std::vector<Field> bank;
  std::vector<double> bump(grid.num_pixels());
  for (std::size_t n = 0; n < count; ++n) {
    for (std::size_t x = 0; x < grid.num_pixels(); ++x) {
      double b = 1.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double len = static_cast<double>(grid.domain_shape()[i] - 1) * grid.domain_spacing()[i];
        const double lo = len * (0.1 + 0.05 * static_cast<double>((n + i) % 3));
        const double hi = len * (0.9 - 0.05 * static_cast<double>((n / 3 + i) % 3));
        const double xi = grid.pixel_coord(x, i);
        if (xi <= lo || xi >= hi) {
          b = 0.0;
          break;
        }
        const double sn = std::sin(pi * (xi - lo) / (hi - lo));
        b *= sn * sn * sn * sn;
      }
      bump[x] = b;
    }
    Field q = grid.field(components);
    for (std::size_t c = 0; c < components; ++c) {
      const double phase = 0.7 * static_cast<double>(c) + 0.3 * static_cast<double>(n);
      for (std::size_t l = 0; l < grid.num_labels(); ++l) {
        double arg = phase;
        for (std::size_t k = 0; k < s; ++k) {
          const double span = grid.range_max(k) - grid.range_min(k);
          const double freq = 1.0 + static_cast<double>((n + k + c) % 2);
          arg += pi * freq * (grid.label_coord(l, k) - grid.range_min(k)) / span;
        }
        const double g = std::cos(arg);
        for (std::size_t x = 0; x < grid.num_pixels(); ++x) {
          q(c, grid.point(x, l)) = bump[x] * g;
        }
      }
    }
    bank.push_back(std::move(q));
  }
  return bank;
}

double weak_residual_norm(const Field& residual, const ProductGrid& grid,
                          const std::vector<Field>& bank) {
  double worst = 0.0;
  for (const Field& q : bank) {
    if (!q.same_shape(residual)) throw DimensionError("weak_residual_norm: test function shape");
    worst = std::max(worst, std::fabs(dot(residual, q)) * grid.cell_volume());
  }
  return worst;
}

}  // namespace liftkit
