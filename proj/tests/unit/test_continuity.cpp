#include <cmath>
#include <vector>

#include "doctest.h"
#include "liftkit/continuity.hpp"
#include "liftkit/error.hpp"
#include "liftkit/verify/consistency.hpp"
#include "support.hpp"

using namespace liftkit;
using liftkit::testing::product_scale;
using liftkit::testing::random_field;

namespace {

std::vector<ProductGrid> test_grids() {
  return {
      ProductGrid::uniform({5}, {0.5}, {0.0}, {1.0}, {4}),
      ProductGrid::uniform({4, 3}, {1.0, 0.7}, {-1.0}, {2.0}, {5}),
      ProductGrid::uniform({3, 4}, {0.9, 1.1}, {0.0, -1.0}, {1.0, 1.0}, {3, 4}),
      ProductGrid::uniform({3, 2, 3}, {1.0, 0.5, 2.0}, {0.0, 0.0}, {1.0, 2.0}, {2, 3}),
  };
}

bool all_zero(const Field& f) { return max_abs(f) == 0.0; }

double max_abs_diff(const Field& a, const Field& b) {
  Field d = a;
  axpy(d, -1.0, b);
  return max_abs(d);
}

// Constant in x, arbitrary in the labels.
Field x_constant(const ProductGrid& grid, std::uint64_t seed) {
  const Field per_label = random_field(grid.num_labels(), 1, seed, 0.0, 1.0);
  Field mu = grid.scalar_field();
  for (std::size_t x = 0; x < grid.num_pixels(); ++x) {
    for (std::size_t l = 0; l < grid.num_labels(); ++l) mu(0, grid.point(x, l)) = per_label(0, l);
  }
  return mu;
}

// At least `margin` cells away from every boundary of the product grid.
bool interior(const ProductGrid& grid, std::size_t pixel, std::size_t label,
              std::size_t margin = 1) {
  for (std::size_t i = 0; i < grid.domain_dims(); ++i) {
    const std::size_t a = grid.pixel_axis_index(pixel, i);
    if (a < margin || a + margin >= grid.domain_shape()[i]) return false;
  }
  for (std::size_t k = 0; k < grid.range_dims(); ++k) {
    const std::size_t a = grid.label_axis_index(label, k);
    if (a < margin || a + margin >= grid.range_shape()[k]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("operator shapes") {
  const auto grid = ProductGrid::uniform({3, 4}, {1.0, 1.0}, {0.0, 0.0}, {1.0, 1.0}, {2, 3});
  const ContinuityOperator first(ContinuityKind::FirstOrder, grid);
  const ContinuityOperator second(ContinuityKind::SecondOrder, grid);
  const ContinuityOperator lap(ContinuityKind::Laplacian, grid);
  CHECK(first.dual_components() == 2);
  CHECK(first.momentum_components() == 4);
  CHECK(first.hessian_components() == 0);
  CHECK(second.dual_components() == 4);
  CHECK(second.momentum_components() == 8);
  CHECK(second.hessian_components() == 16);
  CHECK(lap.dual_components() == 1);
  CHECK(lap.momentum_components() == 2);
  CHECK(lap.hessian_components() == 4);
}

TEST_CASE("adjoint identities on random fields") {
  std::uint64_t seed = 100;
  for (const auto& grid : test_grids()) {
    const std::size_t d = grid.domain_dims();
    const std::size_t s = grid.range_dims();
    for (int rep = 0; rep < 50; ++rep) {
      const Field mu = random_field(grid, 1, ++seed);
      {
        const Field E = random_field(grid, d * s, ++seed);
        const Field q = random_field(grid, d, ++seed);
        const auto parts = apply_adjoint_first(q, grid);
        const Field r = residual_first(mu, E, grid);
        const double lhs = dot(mu, parts.mu_part) + dot(E, parts.E_part);
        const double scale = product_scale(mu, parts.mu_part) + product_scale(E, parts.E_part);
        CHECK(std::fabs(lhs + dot(r, q)) <= 1e-12 * scale);
      }
      {
        const Field E = random_field(grid, d * d * s, ++seed);
        const Field H = random_field(grid, d * s * d * s, ++seed);
        const Field q = random_field(grid, d * d, ++seed);
        const auto parts = apply_adjoint_second(q, grid);
        const Field r = residual_second(mu, E, H, grid, false);
        const double lhs =
            dot(mu, parts.mu_part) + dot(E, parts.E_part) + dot(H, parts.H_part);
        const double scale = product_scale(mu, parts.mu_part) +
                             product_scale(E, parts.E_part) + product_scale(H, parts.H_part);
        CHECK(std::fabs(lhs - dot(r, q)) <= 1e-12 * scale);
      }
      {
        const Field E = random_field(grid, s, ++seed);
        const Field H = random_field(grid, s * s, ++seed);
        const Field q = random_field(grid, 1, ++seed);
        const auto parts = apply_adjoint_laplace(q, grid);
        const Field r = residual_laplace(mu, E, H, grid);
        const double lhs =
            dot(mu, parts.mu_part) + dot(E, parts.E_part) + dot(H, parts.H_part);
        const double scale = product_scale(mu, parts.mu_part) +
                             product_scale(E, parts.E_part) + product_scale(H, parts.H_part);
        CHECK(std::fabs(lhs - dot(r, q)) <= 1e-12 * scale);
      }
    }
  }
}

TEST_CASE("in-place forms accumulate") {
  const auto grid = test_grids()[2];
  const std::size_t d = grid.domain_dims();
  const std::size_t s = grid.range_dims();
  const Field mu = random_field(grid, 1, 1);
  const Field E = random_field(grid, d * d * s, 2);
  const Field H = random_field(grid, d * s * d * s, 3);
  const Field base = random_field(grid, d * d, 4);
  Field out = base;
  residual_second_into(mu, E, H, grid, out, true);
  Field expect = residual_second(mu, E, H, grid, false);
  axpy(expect, 1.0, base);
  CHECK(max_abs_diff(out, expect) <= 1e-12);

  const Field q = random_field(grid, 1, 5);
  AdjointParts parts{random_field(grid, 1, 6), random_field(grid, s, 7),
                     random_field(grid, s * s, 8)};
  AdjointParts acc = parts;
  adjoint_laplace_into(q, grid, acc.mu_part, acc.E_part, acc.H_part, true);
  auto fresh = apply_adjoint_laplace(q, grid);
  axpy(fresh.mu_part, 1.0, parts.mu_part);
  axpy(fresh.H_part, 1.0, parts.H_part);
  CHECK(max_abs_diff(acc.mu_part, fresh.mu_part) <= 1e-12);
  CHECK(max_abs_diff(acc.H_part, fresh.H_part) <= 1e-12);
}

TEST_CASE("zero test functions give zero parts") {
  for (const auto& grid : test_grids()) {
    const std::size_t d = grid.domain_dims();
    const auto p1 = apply_adjoint_first(grid.field(d), grid);
    CHECK(all_zero(p1.mu_part));
    CHECK(all_zero(p1.E_part));
    const auto p2 = apply_adjoint_second(grid.field(d * d), grid);
    CHECK(all_zero(p2.mu_part));
    CHECK(all_zero(p2.E_part));
    CHECK(all_zero(p2.H_part));
    const auto p3 = apply_adjoint_laplace(grid.scalar_field(), grid);
    CHECK(all_zero(p3.mu_part));
    CHECK(all_zero(p3.E_part));
    CHECK(all_zero(p3.H_part));
  }
}

TEST_CASE("label-only test functions have no mu part") {
  for (const auto& grid : test_grids()) {
    const std::size_t d = grid.domain_dims();
    Field q = grid.field(d);
    for (std::size_t i = 0; i < d; ++i) {
      const Field z = x_constant(grid, 40 + i);
      std::copy(z.component(0).begin(), z.component(0).end(), q.component(i).begin());
    }
    // Neumann closure: the divergence of an x-constant field vanishes only
    // away from the domain boundary.
    const auto parts = apply_adjoint_first(q, grid);
    for (std::size_t x = 0; x < grid.num_pixels(); ++x) {
      if (grid.pixel_on_boundary(x)) continue;
      for (std::size_t l = 0; l < grid.num_labels(); ++l) {
        CHECK(std::fabs(parts.mu_part(0, grid.point(x, l))) <= 1e-12);
      }
    }
  }
}

TEST_CASE("constant and affine test functions (interior)") {
  const auto grid = ProductGrid::uniform({7, 6}, {0.5, 1.0}, {-1.0}, {1.0}, {6});
  const Field q2 = grid.field(4, 1.7);
  const auto p2 = apply_adjoint_second(q2, grid);
  CHECK(all_zero(p2.E_part));
  CHECK(all_zero(p2.H_part));
  // The nested divergence feels the closure two cells deep.
  for (std::size_t x = 0; x < grid.num_pixels(); ++x) {
    for (std::size_t l = 0; l < grid.num_labels(); ++l) {
      if (!interior(grid, x, l, 2)) continue;
      const std::size_t t = grid.point(x, l);
      CHECK(std::fabs(p2.mu_part(0, t)) <= 1e-12);
      for (std::size_t c = 0; c < 4; ++c) CHECK(p2.E_part(c, t) == 0.0);
      for (std::size_t c = 0; c < 4; ++c) CHECK(std::fabs(p2.H_part(c, t)) <= 1e-12);
    }
  }

  // q = 0.3 + 2 x - y + 0.5 z
  Field q = grid.scalar_field();
  for (std::size_t x = 0; x < grid.num_pixels(); ++x) {
    for (std::size_t l = 0; l < grid.num_labels(); ++l) {
      q(0, grid.point(x, l)) = 0.3 + 2.0 * grid.pixel_coord(x, 0) - grid.pixel_coord(x, 1) +
                               0.5 * grid.label_coord(l, 0);
    }
  }
  const auto p3 = apply_adjoint_laplace(q, grid);
  for (std::size_t x = 0; x < grid.num_pixels(); ++x) {
    for (std::size_t l = 0; l < grid.num_labels(); ++l) {
      if (!interior(grid, x, l)) continue;
      const std::size_t t = grid.point(x, l);
      CHECK(std::fabs(p3.mu_part(0, t)) <= 1e-12);
      CHECK(std::fabs(p3.H_part(0, t)) <= 1e-12);
      CHECK(p3.E_part(0, t) == doctest::Approx(0.5).epsilon(1e-12));
    }
  }
}

TEST_CASE("hand-evaluated first-order residual") {
  // 3 pixels (h = 1), 2 labels at z = 0, 1.
  const auto grid = ProductGrid::uniform({3}, {1.0}, {0.0}, {1.0}, {2});
  Field mu = grid.scalar_field();
  Field E = grid.field(1);
  mu(0, grid.point(0, 0)) = 1.0;
  mu(0, grid.point(1, 1)) = 1.0;
  E(0, grid.point(0, 0)) = 1.0;
  const Field r = residual_first(mu, E, grid);
  // grad_x mu: pixel 0 -> (-1, +1), pixel 1 -> (0, -1), pixel 2 -> 0.
  // div_z E at pixel 0: label 0 -> +1, label 1 -> -1.
  CHECK(r(0, grid.point(0, 0)) == 0.0);
  CHECK(r(0, grid.point(0, 1)) == 0.0);
  CHECK(r(0, grid.point(1, 0)) == 0.0);
  CHECK(r(0, grid.point(1, 1)) == -1.0);
  CHECK(r(0, grid.point(2, 0)) == 0.0);
  CHECK(r(0, grid.point(2, 1)) == 0.0);
}

TEST_CASE("x-constant measures lie in every kernel") {
  for (const auto& grid : test_grids()) {
    const std::size_t d = grid.domain_dims();
    const std::size_t s = grid.range_dims();
    const Field mu = x_constant(grid, 7);
    CHECK(all_zero(residual_first(mu, grid.field(d * s), grid)));
    CHECK(all_zero(residual_second(mu, grid.field(d * d * s), grid.field(d * s * d * s), grid)));
    CHECK(all_zero(residual_laplace(mu, grid.field(s), grid.field(s * s), grid, true)));
  }
}

TEST_CASE("x-varying measure without momentum has residual grad_x mu") {
  const auto grid = test_grids()[1];
  const Field mu = random_field(grid.num_points(), 1, 9, 0.0, 1.0);
  const Field r = residual_first(mu, grid.field(2), grid);
  CHECK(max_abs(r) > 0.1);
  CHECK(max_abs_diff(r, grad_x(mu, grid)) <= 1e-15);
}

TEST_CASE("second-order graph triple needs its H part") {
  const double pi = 3.141592653589793;
  std::vector<double> with_h, without_h;
  for (std::size_t n : {32u, 64u, 128u}) {
    const double h = 1.0 / static_cast<double>(n - 1);
    const auto grid = ProductGrid::uniform({n}, {h}, {-1.0}, {1.0}, {n});
    GraphFunction u({n}, 1);
    Field grad = grid.pixel_field(1), hess = grid.pixel_field(1);
    for (std::size_t x = 0; x < n; ++x) {
      const double a = pi * grid.pixel_coord(x, 0);
      u.values(0, x) = 0.6 * std::sin(a);
      grad(0, x) = 0.6 * pi * std::cos(a);
      hess(0, x) = -0.6 * pi * pi * std::sin(a);
    }
    GraphTriple t = graph_triple_second(u, grad, hess, grid);
    const auto bank = test_function_bank(grid, 1, 6);
    with_h.push_back(weak_residual_norm(graph_residual(ContinuityKind::SecondOrder, t), grid, bank));
    t.H->values.fill(0.0);
    without_h.push_back(
        weak_residual_norm(graph_residual(ContinuityKind::SecondOrder, t), grid, bank));
  }
  for (std::size_t i = 0; i < with_h.size(); ++i) {
    CHECK(without_h[i] > 0.5);
    if (i > 0) CHECK(with_h[i - 1] / with_h[i] >= 1.8);
  }
  CHECK(without_h.back() > 5.0 * with_h.back());
}

TEST_CASE("symmetry and PSD checks") {
  const auto grid = test_grids()[2];
  const std::size_t d = grid.domain_dims();
  const std::size_t s = grid.range_dims();
  const Field mu = grid.scalar_field();
  Field H = grid.field(d * s * d * s);
  H(((0 * s + 0) * d + 1) * s + 1, 0) = 1.0;  // [0,0,1,1] without its [0,1,1,0] partner
  CHECK_THROWS_AS(residual_second(mu, grid.field(d * d * s), H, grid), RangeError);
  CHECK_NOTHROW(residual_second(mu, grid.field(d * d * s), H, grid, false));

  Field L = grid.field(s * s);
  L(0, 3) = -1.0;
  CHECK_THROWS_AS(residual_laplace(mu, grid.field(s), L, grid, true), RangeError);
  CHECK_NOTHROW(residual_laplace(mu, grid.field(s), L, grid));
  L(0, 3) = 1.0;
  L(1, 3) = L(2, 3) = 0.5;
  L(3, 3) = 1.0;
  CHECK_NOTHROW(residual_laplace(mu, grid.field(s), L, grid, true));
}

TEST_CASE("shape mismatches") {
  const auto grid = test_grids()[1];
  CHECK_THROWS_AS(apply_adjoint_first(grid.field(1), grid), DimensionError);
  CHECK_THROWS_AS(apply_adjoint_second(grid.field(2), grid), DimensionError);
  CHECK_THROWS_AS(apply_adjoint_laplace(grid.field(2), grid), DimensionError);
  CHECK_THROWS_AS(residual_first(grid.scalar_field(), grid.field(1), grid), DimensionError);
  CHECK_THROWS_AS(residual_laplace(grid.scalar_field(), grid.field(1), grid.field(2), grid),
                  DimensionError);
  const Field r = grid.field(2);
  CHECK_THROWS_AS(weak_residual_norm(r, grid, test_function_bank(grid, 1, 2)), DimensionError);
}

TEST_CASE("graph triples converge in the weak norm") {
  const auto levels = verify::consistency_study({16, 32, 64});
  for (auto kind : {ContinuityKind::FirstOrder, ContinuityKind::SecondOrder,
                    ContinuityKind::Laplacian}) {
    CAPTURE(static_cast<int>(kind));
    CHECK(verify::min_ratio(levels, kind, true) >= 1.8);
    // Pointwise values of Dirac densities grow under refinement.
    CHECK(verify::min_ratio(levels, kind, false) < 1.0);
  }
}
