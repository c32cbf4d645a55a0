#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "liftkit/error.hpp"
#include "liftkit/solver.hpp"
#include "liftkit/verify/oracles.hpp"

using namespace liftkit;

namespace {

std::vector<double> zero_cost(const ProductGrid& grid) {
  return std::vector<double>(grid.num_points(), 0.0);
}

Integrand tv(const ProductGrid& grid, double w) {
  return Integrand(RegularizerKind::NuclearNorm, {grid.domain_dims(), grid.range_dims()}, {0.0},
                   w);
}

Integrand quad(const ProductGrid& grid, double w) {
  return Integrand(RegularizerKind::SquaredL2Half, {grid.range_dims()}, {0.0}, w);
}

// mu concentrated on label `l` at every pixel.
FieldSet constant_start(const SaddleProblem& p, std::size_t l) {
  FieldSet x = p.make_primal();
  for (std::size_t px = 0; px < p.grid.num_pixels(); ++px) x[0](0, p.grid.point(px, l)) = 1.0;
  return x;
}

double mass_error(const SaddleProblem& p, const FieldSet& x) {
  double worst = 0.0;
  for (std::size_t px = 0; px < p.grid.num_pixels(); ++px) {
    double total = 0.0;
    for (std::size_t l = 0; l < p.grid.num_labels(); ++l) {
      const double m = x[0](0, p.grid.point(px, l));
      worst = std::max(worst, -m);
      total += m;
    }
    worst = std::max(worst, std::fabs(total - 1.0));
  }
  return worst;
}

std::string csv_of(const SolveReport& r) {
  std::ostringstream os;
  r.write_csv(os);
  return os.str();
}

}  // namespace

TEST_CASE("first-order assembly: sizes, layout and adjoint check") {
  const auto grid = ProductGrid::uniform({4, 4}, {1.0, 1.0}, {0.0}, {1.0}, {3});
  const auto p = assemble_first_order(grid, tv(grid, 1.0), zero_cost(grid));
  CHECK(p.adjoint_error <= 1e-10);
  CHECK_FALSE(p.split);
  const FieldSet x = p.make_primal();
  const FieldSet y = p.make_dual();
  REQUIRE(x.size() == 2);
  CHECK(x.name(0) == "mu");
  CHECK(x.name(1) == "E");
  CHECK(x[0].points() == 4 * 4 * 3);
  CHECK(x[1].components() == 2);
  REQUIRE(y.size() == 3);
  CHECK(y.name(0) == "phi_lambda");
  CHECK(y.name(1) == "phi_xi");
  CHECK(y.name(2) == "q");
  CHECK(y[2].components() == 2);
  CHECK(x.total_size() == 48 * 3);
  CHECK(y.total_size() == 48 * 5);
  CHECK(adjoint_mismatch(p, 99) <= 1e-10);
}

TEST_CASE("assembly rejects unsupported regularizers") {
  const auto grid = ProductGrid::uniform({4}, {1.0}, {0.0}, {1.0}, {3});
  CHECK_THROWS_AS(assemble_first_order(grid, quad(grid, 1.0), zero_cost(grid)),
                  UnsupportedConfigurationError);
  CHECK_THROWS_AS(assemble_laplacian(grid, tv(grid, 1.0), zero_cost(grid)),
                  UnsupportedConfigurationError);
  const Integrand power(RegularizerKind::PowerCost, {1, 1}, {0.0}, 1.0, 3.0);
  CHECK_THROWS_AS(assemble_second_order(grid, power, zero_cost(grid)),
                  UnsupportedConfigurationError);
  CHECK_THROWS_AS(assemble_first_order(grid, tv(grid, 1.0), std::vector<double>(5, 0.0)),
                  DimensionError);
}

TEST_CASE("laplacian assembly carries exactly the four constraint blocks") {
  const auto grid = ProductGrid::uniform({3, 3}, {1.0, 1.0}, {0.0, 0.0}, {1.0, 1.0}, {3, 3});
  const auto p = assemble_laplacian(grid, quad(grid, 0.5), zero_cost(grid));
  CHECK(p.adjoint_error <= 1e-10);
  CHECK(p.split);
  using Kind = prox::ProjectionSpec::Kind;
  std::multiset<Kind> kinds;
  for (const auto& s : p.primal_constraints) kinds.insert(s.kind);
  for (const auto& s : p.dual_constraints) kinds.insert(s.kind);
  CHECK(kinds == std::multiset<Kind>{Kind::UpperBound, Kind::QuadEpigraph, Kind::Simplex,
                                     Kind::PSDCone});
  const FieldSet x = p.make_primal();
  REQUIRE(x.size() == 4);
  CHECK(x.name(2) == "H");
  CHECK(x[2].components() == 4);
  CHECK(x.name(3) == "r");
  const FieldSet y = p.make_dual();
  CHECK(y.contains("phi_lambda1"));
  CHECK(y.contains("phi_lambda2"));
  CHECK(y.at("q").components() == 1);
}

TEST_CASE("laplacian coupling vanishes on constant mu with zero momentum") {
  const auto grid = ProductGrid::uniform({4, 3}, {1.0, 1.0}, {0.0, 0.0}, {1.0, 1.0}, {2, 3});
  const auto p = assemble_laplacian(grid, quad(grid, 1.0), zero_cost(grid));
  const FieldSet x = constant_start(p, 4);
  FieldSet y = p.make_dual();
  apply_coupling(p, x, y);
  for (double v : y.at("q").values()) CHECK(v == 0.0);
  CHECK(continuity_residual(p, x) == 0.0);
  CHECK(primal_energy(p, x) == 0.0);
}

TEST_CASE("second-order assembly passes its adjoint check") {
  const auto grid = ProductGrid::uniform({3, 4}, {1.0, 0.5}, {0.0}, {1.0}, {4});
  const Integrand nuclear(RegularizerKind::NuclearNorm, {2, 2, 1}, {0.0}, 1.0);
  const auto p = assemble_second_order(grid, nuclear, zero_cost(grid));
  CHECK(p.adjoint_error <= 1e-10);
  CHECK(p.make_primal().at("E").components() == 4);
  CHECK(p.make_primal().at("H").components() == 4);
  CHECK(p.make_dual().at("q").components() == 4);
  CHECK_THROWS_AS(assemble_second_order(grid, tv(grid, 1.0), zero_cost(grid)), DimensionError);
  const Integrand l2(RegularizerKind::SquaredL2Half, {4}, {0.0}, 1.0);
  const auto q = assemble_second_order(grid, l2, zero_cost(grid));
  CHECK(q.split);
  CHECK(q.adjoint_error <= 1e-10);
}

TEST_CASE("projections keep mu in the simplex") {
  const auto grid = ProductGrid::uniform({5}, {1.0}, {0.0}, {1.0}, {4});
  const auto p = assemble_first_order(grid, tv(grid, 1.0), zero_cost(grid));
  FieldSet x = p.make_primal();
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 2.0);
  for (double& v : x[0].values()) v = n(rng);
  project_primal(p, x);
  CHECK(mass_error(p, x) <= 1e-12);
}

TEST_CASE("zero cost with TV: solver reaches a constant with vanishing energy") {
  const auto grid = ProductGrid::uniform({8}, {1.0}, {0.0}, {1.0}, {4});
  const auto p = assemble_first_order(grid, tv(grid, 0.5), zero_cost(grid));
  FieldSet start = p.make_primal();
  for (std::size_t px = 0; px < 8; ++px) start[0](0, grid.point(px, px < 4 ? 0 : 3)) = 1.0;
  // Plain PDHG approaches this degenerate optimum sublinearly.
  SolverConfig cfg;
  cfg.max_iters = 60000;
  cfg.tol_gap = 1e-8;
  const auto res = solve(p, cfg, &start);
  CHECK(res.report.energy <= 1e-4);
  CHECK(res.report.residual <= 1e-4);
  const auto u = unlift(lifted_measure(p, res.primal));
  double lo = 1e300, hi = -1e300;
  for (double v : u.values.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi - lo <= 1e-2);
}

TEST_CASE("feasible constant warm start terminates within one checkpoint") {
  const auto grid = ProductGrid::uniform({6, 5}, {1.0, 1.0}, {0.0}, {1.0}, {5});
  const auto p = assemble_first_order(grid, tv(grid, 1.0), zero_cost(grid));
  const FieldSet start = constant_start(p, 2);
  SolverConfig cfg;
  cfg.check_every = 10;
  const auto res = solve(p, cfg, &start);
  CHECK(res.report.converged);
  CHECK(res.report.iterations == 10);
  CHECK(res.report.residual == 0.0);
  CHECK(res.report.energy == 0.0);
  for (const auto& [name, v] : res.report.violations) CHECK(v == 0.0);
}

TEST_CASE("operator norm estimates") {
  SUBCASE("identity") {
    LinearOperator id{7, 7, [](auto in, auto out) { std::copy(in.begin(), in.end(), out.begin()); },
                      [](auto in, auto out) { std::copy(in.begin(), in.end(), out.begin()); }};
    std::vector<double> history;
    const double n = estimate_opnorm(id, 20, 1, &history);
    CHECK(n == doctest::Approx(1.05).epsilon(1e-12));
    CHECK(history.size() == 20);
  }
  SUBCASE("diagonal: monotone history converging to the top entry") {
    const std::vector<double> diag{1.0, 3.0, 2.0, 2.9, 0.5};
    auto apply = [&diag](std::span<const double> in, std::span<double> out) {
      for (std::size_t i = 0; i < diag.size(); ++i) out[i] = diag[i] * in[i];
    };
    LinearOperator op{5, 5, apply, apply};
    std::vector<double> history;
    const double n = estimate_opnorm(op, 200, 4, &history);
    for (std::size_t i = 1; i < history.size(); ++i) CHECK(history[i] >= history[i - 1]);
    CHECK(n == doctest::Approx(3.0 * 1.05).epsilon(1e-6));
    CHECK(n <= 3.0 * 1.05 + 1e-12);
  }
  SUBCASE("first-order coupling doubles when the spacing halves") {
    auto norm_at = [](std::size_t n) {
      const auto grid =
          ProductGrid::uniform({n, n}, {1.0 / n, 1.0 / n}, {0.0}, {1.0}, {3});
      return estimate_opnorm(assemble_first_order(grid, tv(grid, 1.0), zero_cost(grid)), 200, 0);
    };
    const double ratio = norm_at(32) / norm_at(16);
    CHECK(ratio > 1.8);
    CHECK(ratio < 2.2);
  }
  SUBCASE("too few iterations") {
    LinearOperator id{1, 1, [](auto in, auto out) { out[0] = in[0]; },
                      [](auto in, auto out) { out[0] = in[0]; }};
    CHECK_THROWS_AS(estimate_opnorm(id, 9, 0), RangeError);
  }
}

TEST_CASE("configuration errors") {
  const auto grid = ProductGrid::uniform({4}, {1.0}, {0.0}, {1.0}, {3});
  const auto p = assemble_first_order(grid, tv(grid, 1.0), zero_cost(grid));
  const double K = estimate_opnorm(p, 50, 0);
  SolverConfig cfg;
  cfg.max_iters = 10;
  cfg.tau = 1.0 / K;
  cfg.sigma = 1.5 / K;
  CHECK_THROWS_AS(solve(p, cfg), RangeError);
  cfg.sigma = 0.9 / K;
  CHECK_NOTHROW(solve(p, cfg));
  SolverConfig bad;
  bad.theta = 1.5;
  CHECK_THROWS_AS(solve(p, bad), RangeError);
  bad = SolverConfig{};
  bad.check_every = 0;
  CHECK_THROWS_AS(solve(p, bad), RangeError);
  FieldSet wrong = assemble_first_order(ProductGrid::uniform({5}, {1.0}, {0.0}, {1.0}, {3}),
                                        tv(grid, 1.0), std::vector<double>(15, 0.0))
                       .make_primal();
  CHECK_THROWS_AS(solve(p, SolverConfig{}, &wrong), DimensionError);
}

TEST_CASE("non-finite data raises a divergence error with the iteration") {
  const auto grid = ProductGrid::uniform({4}, {1.0}, {0.0}, {1.0}, {3});
  auto p = assemble_first_order(grid, tv(grid, 1.0), zero_cost(grid));
  p.cost[5] = std::numeric_limits<double>::quiet_NaN();
  p.dual_constraints[0] = prox::ProjectionSpec::upper_bound("phi_lambda", p.cost);
  SolverConfig cfg;
  cfg.check_every = 7;
  try {
    solve(p, cfg);
    FAIL("expected a divergence error");
  } catch (const DivergenceError& e) {
    CHECK(e.iteration() >= 1);
    CHECK(e.iteration() <= 7);
  }
}

TEST_CASE("solve is deterministic and exports a CSV history") {
  const auto grid = ProductGrid::uniform({10}, {1.0}, {0.0}, {1.0}, {5});
  std::vector<double> cost(grid.num_points());
  for (std::size_t px = 0; px < 10; ++px) {
    const double g = px < 5 ? 0.2 : 0.8;
    for (std::size_t l = 0; l < 5; ++l) {
      const double z = grid.label_coord(l, 0);
      cost[grid.point(px, l)] = (z - g) * (z - g);
    }
  }
  const auto p = assemble_first_order(grid, tv(grid, 0.1), cost);
  SolverConfig cfg;
  cfg.max_iters = 300;
  cfg.check_every = 50;
  const auto a = solve(p, cfg);
  const auto b = solve(p, cfg);
  CHECK(a.primal.flatten() == b.primal.flatten());
  CHECK(a.dual.flatten() == b.dual.flatten());
  const std::string csv = csv_of(a.report);
  CHECK(csv == csv_of(b.report));
  CHECK(csv.rfind("iteration,energy,residual,violation\n", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) ==
        a.report.history.size() + 1);
  CHECK(a.report.history.front().iteration == 0);
  CHECK(a.report.history.back().iteration == a.report.iterations);
  CHECK(a.report.tau * a.report.sigma * a.report.opnorm * a.report.opnorm <= 1.0 + 1e-12);
  CHECK(mass_error(p, a.primal) <= 1e-12);
}

TEST_CASE("1D denoising matches the direct TV solution within one label") {
  const std::size_t n = 24, L = 9;
  const auto grid = ProductGrid::uniform({n}, {1.0}, {0.0}, {1.0}, {L});
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = i < 9 ? 0.25 : i < 17 ? 0.7 : 0.4;
  std::vector<double> cost(grid.num_points());
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t l = 0; l < L; ++l) {
      const double z = grid.label_coord(l, 0);
      cost[grid.point(x, l)] = (z - g[x]) * (z - g[x]);
    }
  }
  const auto p = assemble_first_order(grid, tv(grid, 0.1), cost);
  SolverConfig cfg;
  cfg.max_iters = 20000;
  cfg.step_balance = 3.0;
  const auto res = solve(p, cfg);
  CHECK(res.report.residual <= 1e-4);
  const auto u = unlift(lifted_measure(p, res.primal));
  const auto ref = oracle::tv_l2_1d(g, 0.1);
  for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(u.values(0, i) - ref[i]) <= 1.0 / (L - 1));
}

TEST_CASE("harmonic problem") {
  SUBCASE("infeasible boundaries") {
    const auto grid = ProductGrid::uniform({4}, {1.0}, {0.0}, {1.0}, {3});
    LiftedMeasure b(grid);
    CHECK_THROWS_AS(assemble_harmonic(grid, b), InfeasibleError);
    b.values(0, grid.point(0, 0)) = 1.0 / grid.label_volume();
    b.values(0, grid.point(3, 1)) = 1.0 / grid.label_volume();
    CHECK_NOTHROW(assemble_harmonic(grid, b));
    b.values(0, grid.point(3, 2)) = -0.5 / grid.label_volume();
    CHECK_THROWS_AS(assemble_harmonic(grid, b), InfeasibleError);
  }
  SUBCASE("equal boundaries give a constant interior at zero energy") {
    const auto grid = ProductGrid::uniform({6}, {0.2}, {0.0}, {1.0}, {5});
    LiftedMeasure b(grid);
    for (std::size_t px : {0, 5}) {
      b.values(0, grid.point(px, 1)) = 0.25 / grid.label_volume();
      b.values(0, grid.point(px, 3)) = 0.75 / grid.label_volume();
    }
    const auto p = assemble_harmonic(grid, b);
    SolverConfig cfg;
    cfg.max_iters = 60000;
    cfg.tol_gap = 1e-8;
    const auto res = solve(p, cfg);
    CHECK(res.report.energy <= 1e-4);
    for (std::size_t px = 0; px < 6; ++px) {
      CHECK(res.primal[0](0, grid.point(px, 1)) == doctest::Approx(0.25).epsilon(1e-2));
      CHECK(res.primal[0](0, grid.point(px, 3)) == doctest::Approx(0.75).epsilon(1e-2));
    }
    CHECK(mass_error(p, res.primal) <= 1e-12);
  }
  SUBCASE("Dirac boundaries give a linear mean") {
    const std::size_t n = 18, L = 16;
    const auto grid = ProductGrid::uniform({n}, {1.0 / (n - 1)}, {0.0}, {1.0}, {L});
    LiftedMeasure b(grid);
    b.values(0, grid.point(0, 0)) = 1.0 / grid.label_volume();
    b.values(0, grid.point(n - 1, L - 1)) = 1.0 / grid.label_volume();
    const auto p = assemble_harmonic(grid, b);
    SolverConfig cfg;
    cfg.max_iters = 20000;
    cfg.step_balance = 3.0;
    cfg.tol_gap = 1e-7;
    const auto res = solve(p, cfg);
    const auto u = unlift(lifted_measure(p, res.primal));
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double x = static_cast<double>(i) / (n - 1);
      CHECK(std::fabs(u.values(0, i) - x) <= 1.5 / (L - 1));
    }
    CHECK(res.primal[0](0, grid.point(0, 0)) == 1.0);
    CHECK(res.primal[0](0, grid.point(n - 1, L - 1)) == 1.0);
    CHECK(mass_error(p, res.primal) <= 1e-12);
  }
}

TEST_CASE("FieldSet bookkeeping") {
  FieldSet fs;
  fs.add("a", Field(3, 1));
  fs.add("b", Field(3, 2));
  CHECK(fs.index("b") == 1);
  CHECK_THROWS_AS(fs.index("c"), DimensionError);
  CHECK(fs.total_size() == 9);
  fs.fill(2.0);
  CHECK(dot(fs, fs) == doctest::Approx(36.0));
  CHECK(norm2(fs) == doctest::Approx(6.0));
  std::vector<double> flat(9);
  for (std::size_t i = 0; i < 9; ++i) flat[i] = static_cast<double>(i);
  fs.assign(flat);
  CHECK(fs.flatten() == flat);
  CHECK(fs.at("b")(1, 0) == 6.0);
  fs.at("a")(0, 1) = std::numeric_limits<double>::infinity();
  CHECK_FALSE(fs.all_finite());
}
