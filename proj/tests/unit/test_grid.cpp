#include <cmath>
#include <numbers>

#include "doctest.h"
#include "liftkit/error.hpp"
#include "liftkit/grid.hpp"
#include "liftkit/simd/kernels.hpp"
#include "support.hpp"

using namespace liftkit;
using liftkit::testing::product_scale;
using liftkit::testing::random_field;

namespace {

ProductGrid line_grid(std::size_t n, double h, std::size_t labels = 2) {
  return ProductGrid::uniform({n}, {h}, {0.0}, {1.0}, {labels});
}

// Scalar field over the grid that depends on the domain coordinates only.
template <class F>
Field sample_x(const ProductGrid& g, F f) {
  Field u = g.scalar_field();
  for (std::size_t p = 0; p < g.num_pixels(); ++p) {
    for (std::size_t l = 0; l < g.num_labels(); ++l) u(0, g.point(p, l)) = f(g, p);
  }
  return u;
}

}  // namespace

TEST_CASE("grid construction validates its invariants") {
  CHECK_THROWS_AS(ProductGrid({1}, {1.0}, {{0.0, 1.0}}), DimensionError);
  CHECK_THROWS_AS(ProductGrid({3}, {0.0}, {{0.0, 1.0}}), DimensionError);
  CHECK_THROWS_AS(ProductGrid({3}, {1.0}, {{0.0}}), DimensionError);
  CHECK_THROWS_AS(ProductGrid({3}, {1.0}, {{1.0, 0.0}}), DimensionError);
  CHECK_THROWS_AS(ProductGrid({3}, {1.0}, {{0.0, 1.0, 3.0}}), DimensionError);

  const auto g = ProductGrid::uniform({4, 5}, {1.0, 0.5}, {-1.0, 0.0}, {1.0, 2.0}, {3, 5});
  CHECK(g.num_pixels() == 20);
  CHECK(g.num_labels() == 15);
  CHECK(g.num_points() == 300);
  CHECK(g.range_spacing()[0] == doctest::Approx(1.0));
  CHECK(g.range_spacing()[1] == doctest::Approx(0.5));
  CHECK(g.cell_volume() == doctest::Approx(0.5 * 0.5));
  const std::size_t idx[2] = {2, 3};
  const std::size_t label = g.label_from_indices(idx);
  CHECK(g.label_coord(label, 0) == doctest::Approx(1.0));
  CHECK(g.label_coord(label, 1) == doctest::Approx(1.5));
  const std::size_t px[2] = {3, 1};
  const std::size_t pixel = g.pixel_from_indices(px);
  CHECK(g.pixel_axis_index(pixel, 0) == 3);
  CHECK(g.pixel_axis_index(pixel, 1) == 1);
  CHECK(g.pixel_on_boundary(pixel));
}

TEST_CASE("grad_x: constant, hand-evaluated, linear") {
  const auto g = line_grid(4, 1.0);
  const Field c = sample_x(g, [](const ProductGrid&, std::size_t) { return 3.5; });
  CHECK(max_abs(grad_x(c, g)) == 0.0);

  const Field ramp = sample_x(g, [](const ProductGrid& gg, std::size_t p) {
    return static_cast<double>(gg.pixel_axis_index(p, 0));
  });
  const Field gr = grad_x(ramp, g);
  const double expected[4] = {1, 1, 1, 0};
  for (std::size_t p = 0; p < 4; ++p) {
    for (std::size_t l = 0; l < g.num_labels(); ++l) CHECK(gr(0, g.point(p, l)) == expected[p]);
  }

  const auto g2 = ProductGrid::uniform({6, 5}, {0.5, 0.25}, {0.0}, {1.0}, {3});
  const Field lin = sample_x(g2, [](const ProductGrid& gg, std::size_t p) {
    return 2.0 * gg.pixel_coord(p, 0) - 3.0 * gg.pixel_coord(p, 1);
  });
  const Field gl = grad_x(lin, g2);
  for (std::size_t p = 0; p < g2.num_pixels(); ++p) {
    if (g2.pixel_axis_index(p, 0) + 1 < 6) CHECK(gl(0, g2.point(p, 1)) == doctest::Approx(2.0));
    if (g2.pixel_axis_index(p, 1) + 1 < 5) CHECK(gl(1, g2.point(p, 1)) == doctest::Approx(-3.0));
  }
}

TEST_CASE("div_x: zero field, adjointness, boundary compensation") {
  const auto g = ProductGrid::uniform({4, 4}, {1.0, 0.7}, {0.0}, {1.0}, {3});
  CHECK(max_abs(div_x(g.field(2), g)) == 0.0);

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Field u = random_field(g, 1, seed);
    const Field v = random_field(g, 2, seed + 100);
    const double lhs = dot(grad_x(u, g), v) + dot(u, div_x(v, g));
    CHECK(std::fabs(lhs) <= 1e-12 * product_scale(u, v));
  }

  // Constant vector field c on a length-4 line: [c, 0, 0, -c] / h.
  const auto line = line_grid(4, 0.5);
  Field v = line.field(1, 2.0);
  const Field dv = div_x(v, line);
  const double expected[4] = {4.0, 0.0, 0.0, -4.0};
  for (std::size_t p = 0; p < 4; ++p) CHECK(dv(0, line.point(p, 0)) == expected[p]);
}

TEST_CASE("grad_z / div_z") {
  const auto g = ProductGrid::uniform({3, 3}, {1.0, 1.0}, {0.0}, {1.5}, {4});
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Field u = random_field(g, 1, seed);
    const Field v = random_field(g, 1, seed + 7);
    CHECK(std::fabs(dot(grad_z(u, g), v) + dot(u, div_z(v, g))) <=
          1e-12 * product_scale(u, v));
  }
  Field u = g.scalar_field();
  for (std::size_t p = 0; p < g.num_pixels(); ++p) {
    for (std::size_t l = 0; l < g.num_labels(); ++l) u(0, g.point(p, l)) = 1.0;
  }
  CHECK(max_abs(grad_z(u, g)) == 0.0);
  for (std::size_t p = 0; p < g.num_pixels(); ++p) {
    for (std::size_t l = 0; l < g.num_labels(); ++l) {
      u(0, g.point(p, l)) = -0.75 * g.label_coord(l, 0) + static_cast<double>(p);
    }
  }
  const Field gz = grad_z(u, g);
  for (std::size_t p = 0; p < g.num_pixels(); ++p) {
    for (std::size_t l = 0; l + 1 < g.num_labels(); ++l) {
      CHECK(gz(0, g.point(p, l)) == doctest::Approx(-0.75));
    }
  }
  // Vector-valued range: adjointness per axis.
  const auto g2 = ProductGrid::uniform({3}, {1.0}, {0.0, -1.0}, {1.0, 1.0}, {3, 4});
  const Field a = random_field(g2, 1, 11);
  const Field b = random_field(g2, 2, 12);
  CHECK(std::fabs(dot(grad_z(a, g2), b) + dot(a, div_z(b, g2))) <= 1e-12 * product_scale(a, b));
}

TEST_CASE("laplace_x") {
  const auto g = ProductGrid::uniform({5, 4}, {1.0, 0.5}, {0.0}, {1.0}, {2});
  const Field c = g.scalar_field(4.0);
  CHECK(max_abs(laplace_x(c, g)) == 0.0);
  const Field u = random_field(g, 1, 3);
  const Field v = random_field(g, 1, 4);
  CHECK(std::fabs(dot(laplace_x(u, g), v) - dot(u, laplace_x(v, g))) <=
        1e-12 * product_scale(u, v));
  CHECK(dot(laplace_x(u, g), u) <= 0.0);
  CHECK(laplace_x(u, g) == div_x(grad_x(u, g), g));

  const auto line = line_grid(6, 1.0);
  const Field q = sample_x(line, [](const ProductGrid& gg, std::size_t p) {
    const double x = gg.pixel_coord(p, 0);
    return x * x;
  });
  const Field lq = laplace_x(q, line);
  for (std::size_t p = 1; p + 1 < 6; ++p) CHECK(lq(0, line.point(p, 0)) == doctest::Approx(2.0));
}

TEST_CASE("hess_z") {
  const auto g = ProductGrid::uniform({3}, {1.0}, {0.0, 0.0}, {3.0, 4.0}, {4, 5});
  Field lin = g.scalar_field();
  Field prod = g.scalar_field();
  for (std::size_t p = 0; p < g.num_pixels(); ++p) {
    for (std::size_t l = 0; l < g.num_labels(); ++l) {
      const double z1 = g.label_coord(l, 0);
      const double z2 = g.label_coord(l, 1);
      lin(0, g.point(p, l)) = 2.0 * z1 - z2 + 1.0;
      prod(0, g.point(p, l)) = z1 * z2;
    }
  }
  const Field hl = hess_z(lin, g);
  const Field hp = hess_z(prod, g);
  for (std::size_t p = 0; p < g.num_pixels(); ++p) {
    for (std::size_t l = 0; l < g.num_labels(); ++l) {
      const std::size_t i1 = g.label_axis_index(l, 0);
      const std::size_t i2 = g.label_axis_index(l, 1);
      const std::size_t t = g.point(p, l);
      CHECK(hp(1, t) == hp(2, t));
      if (i1 > 0 && i1 + 1 < 4 && i2 > 0 && i2 + 1 < 5) {
        for (std::size_t c = 0; c < 4; ++c) CHECK(hl(c, t) == doctest::Approx(0.0));
        CHECK(hp(1, t) == doctest::Approx(1.0));
        CHECK(hp(0, t) == doctest::Approx(0.0));
        CHECK(hp(3, t) == doctest::Approx(0.0));
      }
    }
  }
  // Diagonal entries are the 1D second differences.
  const Field u = random_field(g, 1, 21);
  const Field h = hess_z(u, g);
  const Field gz = grad_z(u, g);
  Field first(g.num_points(), 1);
  Field second = g.scalar_field();
  std::copy(gz.component(0).begin(), gz.component(0).end(), first.values().begin());
  backward_div(first.component(0), second.component(0), g, 1);
  for (std::size_t t = 0; t < g.num_points(); ++t) CHECK(h(0, t) == second(0, t));

  const Field w = random_field(g, 4, 22);
  CHECK(std::fabs(dot(hess_z(u, g), w) - dot(u, hess_z_adjoint(w, g))) <=
        1e-12 * product_scale(u, w));
}

TEST_CASE("grad_x is first-order consistent") {
  // u = cos(pi x) on [0, 1]: u'(0) = u'(1) = 0, so the Neumann slice is exact
  // and the sup error is the interior truncation error h/2 * max|u''|.
  auto error_at = [](std::size_t n) {
    const double h = 1.0 / static_cast<double>(n - 1);
    const auto g = ProductGrid::uniform({n}, {h}, {0.0}, {1.0}, {2});
    const Field u = sample_x(g, [](const ProductGrid& gg, std::size_t p) {
      return std::cos(std::numbers::pi * gg.pixel_coord(p, 0));
    });
    const Field gu = grad_x(u, g);
    double err = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const double x = g.pixel_coord(p, 0);
      const double exact = -std::numbers::pi * std::sin(std::numbers::pi * x);
      err = std::max(err, std::fabs(gu(0, g.point(p, 0)) - exact));
    }
    return err;
  };
  const double e1 = error_at(33);
  const double e2 = error_at(65);
  CHECK(e2 / e1 <= 0.6);
}

TEST_CASE("finite differences reject mismatched shapes") {
  const auto g = ProductGrid::uniform({3, 3}, {1.0, 1.0}, {0.0}, {1.0}, {2});
  CHECK_THROWS_AS(grad_x(g.field(2), g), DimensionError);
  CHECK_THROWS_AS(div_x(g.field(1), g), DimensionError);
  CHECK_THROWS_AS(grad_z(Field(5, 1), g), DimensionError);
  CHECK_THROWS_AS(div_z(g.field(2), g), DimensionError);
  CHECK_THROWS_AS(hess_z(g.field(2), g), DimensionError);
}

TEST_CASE("operators are bit-identical across kernel variants") {
  if (simd::avx2_kernels() == nullptr || !simd::cpu_has_avx2()) return;
  const auto g = ProductGrid::uniform({7, 5}, {0.3, 1.1}, {0.0, -2.0}, {1.0, 2.0}, {5, 3});
  const Field u = random_field(g, 1, 5);
  const Field v = random_field(g, 2, 6);
  const Field w = random_field(g, 4, 7);
  auto run = [&] {
    return std::vector<Field>{grad_x(u, g), div_x(v, g), grad_z(u, g), div_z(v, g),
                              laplace_x(u, g), hess_z(u, g), hess_z_adjoint(w, g)};
  };
  REQUIRE(simd::select("scalar"));
  const auto ref = run();
  REQUIRE(simd::select("avx2"));
  const auto vec = run();
  simd::select("auto");
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(ref[i] == vec[i]);
}
