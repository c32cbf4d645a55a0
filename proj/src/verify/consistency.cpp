#include "liftkit/verify/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace liftkit::verify {

std::vector<ConsistencyLevel> consistency_study(const std::vector<std::size_t>& sizes,
                                                std::size_t bank_size) {
  const double pi = std::numbers::pi;
  std::vector<ConsistencyLevel> out;
  for (std::size_t n : sizes) {
    const double h = 1.0 / static_cast<double>(n - 1);
    const auto grid = ProductGrid::uniform({n, n}, {h, h}, {-1.0}, {1.0}, {n});
    GraphFunction u({n, n}, 1);
    Field grad = grid.pixel_field(2), hess = grid.pixel_field(4), lap = grid.pixel_field(1);
    for (std::size_t x = 0; x < grid.num_pixels(); ++x) {
      const double a = pi * grid.pixel_coord(x, 0);
      const double b = 0.5 * pi * grid.pixel_coord(x, 1);
      u.values(0, x) = 0.5 * std::sin(a) * std::cos(b);
      grad(0, x) = 0.5 * pi * std::cos(a) * std::cos(b);
      grad(1, x) = -0.25 * pi * std::sin(a) * std::sin(b);
      hess(0, x) = -0.5 * pi * pi * std::sin(a) * std::cos(b);
      hess(1, x) = -0.25 * pi * pi * std::cos(a) * std::sin(b);
      hess(2, x) = hess(1, x);
      hess(3, x) = -0.125 * pi * pi * std::sin(a) * std::cos(b);
      lap(0, x) = hess(0, x) + hess(3, x);
    }
    ConsistencyLevel level{n, n, {}, {}};
    const std::array<ContinuityKind, 3> kinds{ContinuityKind::FirstOrder,
                                              ContinuityKind::SecondOrder,
                                              ContinuityKind::Laplacian};
    for (std::size_t m = 0; m < 3; ++m) {
      const GraphTriple t = m == 0   ? graph_triple_first(u, grad, grid)
                            : m == 1 ? graph_triple_second(u, grad, hess, grid)
                                     : graph_triple_laplace(u, grad, lap, grid);
      const Field r = graph_residual(kinds[m], t);
      level.sup[m] = max_abs(r);
      level.weak[m] = weak_residual_norm(r, grid, test_function_bank(grid, r.components(), bank_size));
    }
    out.push_back(level);
  }
  return out;
}

double min_ratio(const std::vector<ConsistencyLevel>& levels, ContinuityKind kind, bool weak) {
  const auto m = static_cast<std::size_t>(kind);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < levels.size(); ++i) {
    const auto& a = weak ? levels[i - 1].weak : levels[i - 1].sup;
    const auto& b = weak ? levels[i].weak : levels[i].sup;
    worst = std::min(worst, a[m] / b[m]);
  }
  return worst;
}

}  // namespace liftkit::verify
