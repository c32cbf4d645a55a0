#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "liftkit/error.hpp"
#include "liftkit/linalg.hpp"
#include "liftkit/prox.hpp"
#include "liftkit/verify/oracles.hpp"

using namespace liftkit;

namespace {

double dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

std::vector<double> uniform(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_CASE("simplex examples") {
  std::vector<double> a{0.5, 0.5};
  prox::project_simplex(a, 1.0);
  CHECK(a == std::vector<double>{0.5, 0.5});
  std::vector<double> b{2.0, 0.0};
  prox::project_simplex(b, 1.0);
  CHECK(b == std::vector<double>{1.0, 0.0});
  CHECK(oracle::simplex(std::vector<double>{2.0, 0.0}, 1.0) == std::vector<double>{1.0, 0.0});
  std::vector<double> c{1.0, 1.0, 1.0};
  prox::project_simplex(c, 1.0);
  for (double v : c) CHECK(v == doctest::Approx(1.0 / 3.0));
  std::vector<double> one{-4.0};
  prox::project_simplex(one, 2.0);
  CHECK(one[0] == 2.0);
  CHECK_THROWS_AS(prox::project_simplex(one, 0.0), RangeError);
}

TEST_CASE("simplex preserves coordinate order") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    auto v = uniform(rng, 6, -2.0, 2.0);
    auto w = v;
    prox::project_simplex(w, 1.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (v[i] <= v[j]) CHECK(w[i] <= w[j]);
      }
    }
  }
}

TEST_CASE("spectral ball examples") {
  std::vector<double> m{3.0, 0.0, 0.0, 3.0};
  prox::project_spectral_ball(m, 2, 2, 1.0);
  CHECK(dist(m, {1.0, 0.0, 0.0, 1.0}) < 1e-14);
  std::vector<double> feasible{0.3, -0.2, 0.1, 0.4, 0.0, 0.2};
  auto copy = feasible;
  prox::project_spectral_ball(copy, 2, 3, 1.0);
  CHECK(copy == feasible);
  std::vector<double> bad{1.0, std::nan(""), 0.0, 0.0};
  CHECK_THROWS_AS(prox::project_spectral_ball(bad, 2, 2, 1.0), NumericError);
}

TEST_CASE("quadratic epigraph examples") {
  std::vector<double> xi{0.0};
  double lam = -1.0;
  prox::project_quad_epigraph(xi, lam);
  CHECK(xi[0] == 0.0);
  CHECK(lam == -1.0);
  lam = 5.0;
  prox::project_quad_epigraph(xi, lam);
  CHECK(xi[0] == 0.0);
  CHECK(lam == 0.0);
  xi = {2.0};
  lam = 0.0;
  prox::project_quad_epigraph(xi, lam);
  const auto ref = oracle::quad_epigraph(std::vector<double>{2.0}, 0.0, 1.0);
  CHECK(std::fabs(xi[0] - ref[0]) < 1e-6);
  CHECK(std::fabs(lam - ref[1]) < 1e-6);
  CHECK(0.5 * xi[0] * xi[0] + lam == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("PSD examples") {
  std::vector<double> id{1.0, 0.0, 0.0, 1.0};
  prox::project_psd(id, 2);
  CHECK(dist(id, {1.0, 0.0, 0.0, 1.0}) < 1e-15);
  std::vector<double> d{1.0, 0.0, 0.0, -2.0};
  prox::project_psd(d, 2);
  CHECK(dist(d, {1.0, 0.0, 0.0, 0.0}) < 1e-15);
  // Non-symmetric input is symmetrized first.
  std::vector<double> ns{1.0, 2.0, 0.0, 1.0};
  auto ref = oracle::psd(ns, 2);
  prox::project_psd(ns, 2);
  CHECK(dist(ns, ref) < 1e-6);
}

TEST_CASE("clip_upper and equality") {
  CHECK(prox::clip_upper(0.3, 1.0) == 0.3);
  CHECK(prox::clip_upper(2.0, 1.0) == 1.0);
  CHECK(prox::clip_upper(prox::clip_upper(2.0, 1.0), 1.0) == 1.0);
  double a = 1.0, b = 0.0, c = 0.0;
  prox::project_equality(a, b, c);
  CHECK(a == doctest::Approx(b + c));
  CHECK(a == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("projections match brute-force oracles on 100 random instances each") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 6);
  std::uniform_real_distribution<double> unit(0.3, 2.0);
  double worst[5] = {0, 0, 0, 0, 0};
  for (int trial = 0; trial < 100; ++trial) {
    {
      auto v = uniform(rng, static_cast<std::size_t>(dim(rng)), -2.0, 2.0);
      const double mass = unit(rng);
      auto w = v;
      prox::project_simplex(w, mass);
      worst[0] = std::max(worst[0], dist(w, oracle::simplex(v, mass)));
    }
    {
      static const std::size_t shapes[][2] = {{2, 2}, {2, 3}, {3, 2}, {1, 5}, {4, 1}, {3, 2}};
      const auto* sh = shapes[trial % 6];
      auto m = uniform(rng, sh[0] * sh[1], -2.0, 2.0);
      const double r = unit(rng);
      auto w = m;
      prox::project_spectral_ball(w, sh[0], sh[1], r);
      worst[1] = std::max(worst[1], dist(w, oracle::spectral_ball(m, sh[0], sh[1], r)));
    }
    {
      const auto s = static_cast<std::size_t>(std::uniform_int_distribution<int>(1, 5)(rng));
      auto xi = uniform(rng, s, -3.0, 3.0);
      const double lam = uniform(rng, 1, -3.0, 3.0)[0];
      const double c = unit(rng);
      auto w = xi;
      double l = lam;
      prox::project_quad_epigraph(w, l, c);
      w.push_back(l);
      worst[2] = std::max(worst[2], dist(w, oracle::quad_epigraph(xi, lam, c)));
    }
    {
      auto m = uniform(rng, 4, -2.0, 2.0);
      m[2] = m[1];
      auto w = m;
      prox::project_psd(w, 2);
      worst[3] = std::max(worst[3], dist(w, oracle::psd(m, 2)));
    }
    {
      auto t = uniform(rng, 3, -2.0, 2.0);
      auto w = t;
      prox::project_equality(w[0], w[1], w[2]);
      worst[4] = std::max(worst[4], dist(w, oracle::equality(t[0], t[1], t[2])));
    }
  }
  for (double w : worst) CHECK(w <= 1e-6);
}

TEST_CASE("block symmetry projection") {
  std::vector<double> h(16);
  for (std::size_t i = 0; i < 16; ++i) h[i] = static_cast<double>(i);
  prox::project_block_symmetric(h, 2, 2);
  // Index ((i * 2 + k) * 2 + j) * 2 + l; [i,k,j,l] pairs with [i,l,j,k].
  CHECK(h[1] == 2.5);   // [0,0,0,1] with [0,1,0,0] = 4
  CHECK(h[4] == 2.5);
  CHECK(h[3] == 4.5);   // [0,0,1,1] with [0,1,1,0] = 6
  CHECK(h[6] == 4.5);
  CHECK(h[0] == 0.0);   // k = l entries are untouched
  CHECK(h[5] == 5.0);
  CHECK_THROWS_AS(prox::project_block_symmetric(h, 2, 3), DimensionError);
}

TEST_CASE("projections are idempotent and nonexpansive") {
  std::mt19937_64 rng(77);
  const std::vector<prox::ProjectionSpec> specs{
      prox::ProjectionSpec::simplex("mu", 5, 1.0),
      prox::ProjectionSpec::nonneg("r"),
      prox::ProjectionSpec::upper_bound("phi", {0.25}),
      prox::ProjectionSpec::spectral_ball("xi", 2, 3, 0.8),
      prox::ProjectionSpec::quad_epigraph("xi", "lam", 3, 0.5),
      prox::ProjectionSpec::psd("H", 2),
      prox::ProjectionSpec::psd("H", 3),
      prox::ProjectionSpec::equality("a", "b", "c"),
      prox::ProjectionSpec::spectral_ball("xi", 2, 2, 0.7),
      prox::ProjectionSpec::block_symmetric("H", 2, 2),
  };
  for (const auto& spec : specs) {
    CAPTURE(prox::kind_name(spec.kind));
    for (int trial = 0; trial < 50; ++trial) {
      auto a = uniform(rng, spec.block_size(), -3.0, 3.0);
      auto b = uniform(rng, spec.block_size(), -3.0, 3.0);
      if (spec.kind == prox::ProjectionSpec::Kind::PSDCone) {
        const std::size_t n = spec.shape[0];
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < i; ++j) {
            a[i * n + j] = a[j * n + i];
            b[i * n + j] = b[j * n + i];
          }
        }
      }
      const double before = dist(a, b);
      prox::apply(spec, a);
      prox::apply(spec, b);
      CHECK(dist(a, b) <= before + 1e-12);
      auto again = a;
      prox::apply(spec, again);
      CHECK(dist(again, a) <= 1e-10);
    }
  }
  std::vector<double> wrong(4);
  CHECK_THROWS_AS(prox::apply(specs[0], wrong), DimensionError);
  CHECK_THROWS_AS(prox::ProjectionSpec::spectral_ball("xi", 2, 2, 0.0), RangeError);
}
