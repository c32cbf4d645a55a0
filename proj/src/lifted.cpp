#include "liftkit/lifted.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "liftkit/error.hpp"
#include "liftkit/linalg.hpp"
#include "liftkit/prox.hpp"

namespace liftkit {
namespace {

std::size_t product(const std::vector<std::size_t>& dims) {
  std::size_t n = 1;
  for (std::size_t v : dims) n *= v;
  return n;
}

std::size_t hessian_components(const ProductGrid& g, HessianField::Layout layout) {
  const std::size_t s = g.range_dims();
  const std::size_t d = g.domain_dims();
  return layout == HessianField::Layout::Laplacian ? s * s : d * s * d * s;
}

void check_rho(const Integrand& intg, const ProductGrid& grid) {
  if (intg.num_points() != 1 && intg.num_points() != grid.num_points()) {
    throw DimensionError("integrand data cost does not match the grid point count");
  }
}

}  // namespace

LiftedMeasure::LiftedMeasure(ProductGrid g, Field v) : grid(std::move(g)), values(std::move(v)) {
  check_shape(values, grid, 1, "LiftedMeasure");
}

LiftedMeasure LiftedMeasure::uniform(const ProductGrid& grid) {
  LiftedMeasure mu(grid);
  mu.values.fill(1.0 / (static_cast<double>(grid.num_labels()) * grid.label_volume()));
  return mu;
}

double LiftedMeasure::pixel_mass(std::size_t pixel) const {
  const std::size_t L = grid.num_labels();
  double s = 0.0;
  for (std::size_t l = 0; l < L; ++l) s += values(0, pixel * L + l);
  return s * grid.label_volume();
}

void LiftedMeasure::validate(double tol) const {
  for (double v : values.values()) {
    if (!(v >= -tol)) throw RangeError("LiftedMeasure: negative or non-finite density");
  }
  for (std::size_t x = 0; x < grid.num_pixels(); ++x) {
    if (std::fabs(pixel_mass(x) - 1.0) > tol) {
      throw RangeError("LiftedMeasure: pixel " + std::to_string(x) + " does not carry unit mass");
    }
  }
}

MomentumField::MomentumField(ProductGrid g, std::vector<std::size_t> dims)
    : grid(std::move(g)), tensor_dims(std::move(dims)), values(grid.field(product(tensor_dims))) {}

MomentumField::MomentumField(ProductGrid g, std::vector<std::size_t> dims, Field v)
    : grid(std::move(g)), tensor_dims(std::move(dims)), values(std::move(v)) {
  check_shape(values, grid, product(tensor_dims), "MomentumField");
}

std::vector<double> MomentumField::at(std::size_t point) const {
  std::vector<double> t(tensor_size());
  for (std::size_t c = 0; c < t.size(); ++c) t[c] = values(c, point);
  return t;
}

HessianField::HessianField(ProductGrid g, Layout l)
    : grid(std::move(g)), layout(l), values(grid.field(hessian_components(grid, l))) {}

HessianField::HessianField(ProductGrid g, Layout l, Field v)
    : grid(std::move(g)), layout(l), values(std::move(v)) {
  check_shape(values, grid, hessian_components(grid, layout), "HessianField");
}

bool HessianField::symmetric_psd(double tol) const {
  if (layout != Layout::Laplacian) throw DimensionError("symmetric_psd: Laplacian layout only");
  const std::size_t s = grid.range_dims();
  std::vector<double> m(s * s), ev(s), vec(s * s);
  for (std::size_t t = 0; t < values.points(); ++t) {
    for (std::size_t c = 0; c < s * s; ++c) m[c] = values(c, t);
    for (std::size_t k = 0; k < s; ++k) {
      for (std::size_t l = k + 1; l < s; ++l) {
        const double a = m[k * s + l], b = m[l * s + k];
        if (std::fabs(a - b) > tol * std::max(1.0, std::fabs(a) + std::fabs(b))) return false;
      }
    }
    linalg::symmetric_eigen(m, s, ev, vec);
    if (ev.front() < -tol) return false;
  }
  return true;
}

bool HessianField::block_symmetric(double tol) const {
  if (layout != Layout::Full) throw DimensionError("block_symmetric: full layout only");
  const std::size_t d = grid.domain_dims();
  const std::size_t s = grid.range_dims();
  auto idx = [&](std::size_t i, std::size_t k, std::size_t j, std::size_t l) {
    return ((i * s + k) * d + j) * s + l;
  };
  for (std::size_t t = 0; t < values.points(); ++t) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = 0; k < s; ++k) {
          for (std::size_t l = k + 1; l < s; ++l) {
            const double a = values(idx(i, k, j, l), t);
            const double b = values(idx(i, l, j, k), t);
            if (std::fabs(a - b) > tol * std::max(1.0, std::fabs(a) + std::fabs(b))) return false;
          }
        }
      }
    }
  }
  return true;
}

GraphFunction::GraphFunction(std::vector<std::size_t> shape, std::size_t range_dims, double fill)
    : domain_shape(std::move(shape)), values(product(domain_shape), range_dims, fill) {}

void GraphFunction::validate(const ProductGrid& grid) const {
  if (domain_shape != grid.domain_shape() || range_dims() != grid.range_dims()) {
    throw DimensionError("GraphFunction: shape does not match the grid");
  }
  for (std::size_t k = 0; k < range_dims(); ++k) {
    const double lo = grid.range_min(k);
    const double hi = grid.range_max(k);
    const double slack = 1e-12 * std::max(1.0, hi - lo);
    for (double v : values.component(k)) {
      if (!(v >= lo - slack && v <= hi + slack)) {
        throw RangeError("GraphFunction: value outside the range box");
      }
    }
  }
}

std::size_t nearest_label(const GraphFunction& u, std::size_t pixel, const ProductGrid& grid) {
  std::vector<std::size_t> idx(grid.range_dims());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const double h = grid.range_spacing()[k];
    const double r = std::round((u.values(k, pixel) - grid.range_min(k)) / h);
    const double top = static_cast<double>(grid.range_shape()[k] - 1);
    idx[k] = static_cast<std::size_t>(std::clamp(r, 0.0, top));
  }
  return grid.label_from_indices(idx);
}

LiftedMeasure lift_graph(const GraphFunction& u, const ProductGrid& grid) {
  u.validate(grid);
  LiftedMeasure mu(grid);
  const double density = 1.0 / grid.label_volume();
  for (std::size_t x = 0; x < grid.num_pixels(); ++x) {
    mu.values(0, grid.point(x, nearest_label(u, x, grid))) = density;
  }
  return mu;
}

MomentumField lift_momentum(const GraphFunction& u, const Field& p,
                            std::vector<std::size_t> tensor_dims, const ProductGrid& grid) {
  u.validate(grid);
  const std::size_t n = product(tensor_dims);
  if (p.points() != grid.num_pixels() || p.components() != n) {
    throw DimensionError("lift_momentum: p must hold one tensor per pixel");
  }
  MomentumField E(grid, std::move(tensor_dims));
  const double density = 1.0 / grid.label_volume();
  for (std::size_t x = 0; x < grid.num_pixels(); ++x) {
    const std::size_t t = grid.point(x, nearest_label(u, x, grid));
    for (std::size_t c = 0; c < n; ++c) E.values(c, t) = p(c, x) * density;
  }
  return E;
}

GraphFunction unlift(const LiftedMeasure& mu) {
  const ProductGrid& grid = mu.grid;
  const std::size_t L = grid.num_labels();
  GraphFunction u(grid.domain_shape(), grid.range_dims());
  for (std::size_t x = 0; x < grid.num_pixels(); ++x) {
    double mass = 0.0;
    for (std::size_t l = 0; l < L; ++l) mass += mu.values(0, x * L + l);
    if (!(mass * grid.label_volume() >= 1e-12)) {
      throw DegenerateMeasureError("unlift: pixel " + std::to_string(x) + " carries no mass");
    }
    for (std::size_t k = 0; k < grid.range_dims(); ++k) {
      double s = 0.0;
      for (std::size_t l = 0; l < L; ++l) s += grid.label_coord(l, k) * mu.values(0, x * L + l);
      u.values(k, x) = std::clamp(s / mass, grid.range_min(k), grid.range_max(k));
    }
  }
  return u;
}

ExtReal bb_eval(const Integrand& intg, const Field& E, const Field& mu, const ProductGrid& grid) {
  check_shape(mu, grid, 1, "bb_eval mu");
  check_shape(E, grid, intg.tensor_size(), "bb_eval E");
  check_rho(intg, grid);
  const double w = grid.cell_volume();
  const std::size_t n = intg.tensor_size();
  std::vector<double> e(n);
  double total = 0.0;
  for (std::size_t t = 0; t < grid.num_points(); ++t) {
    const double m = mu(0, t);
    if (m < -kMassEpsilon) return ExtReal::infinity();
    bool zero = true;
    for (std::size_t c = 0; c < n; ++c) {
      e[c] = E(c, t);
      zero = zero && e[c] == 0.0;
    }
    ExtReal v;
    if (m > kMassEpsilon) {
      v = intg.perspective(t, e, m);
    } else if (!zero) {
      v = intg.recession(t, e);
    } else {
      continue;
    }
    if (v.is_infinite()) return v;
    total += w * v.value();
  }
  return ExtReal(total);
}

ExtReal bb_eval(const Integrand& intg, const MomentumField& E, const LiftedMeasure& mu) {
  if (!(E.grid == mu.grid)) throw DimensionError("bb_eval: E and mu live on different grids");
  if (E.tensor_dims != intg.tensor_dims()) throw DimensionError("bb_eval: tensor shape mismatch");
  return bb_eval(intg, E.values, mu.values, mu.grid);
}

double bb_dual_oracle(const Integrand& intg, const MomentumField& E, const LiftedMeasure& mu,
                      std::size_t n_samples, std::uint64_t seed) {
  const ProductGrid& grid = mu.grid;
  if (grid.num_points() > 200) throw DimensionError("bb_dual_oracle: at most 200 grid points");
  if (!(E.grid == grid)) throw DimensionError("bb_dual_oracle: E and mu live on different grids");
  check_shape(E.values, grid, intg.tensor_size(), "bb_dual_oracle E");
  check_rho(intg, grid);
  if (n_samples == 0) n_samples = 1;

  const std::size_t n = intg.tensor_size();
  const bool nuclear = intg.kind() == RegularizerKind::NuclearNorm;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> e(n), xi(n), grad(n), trial(n), cg(n);
  double total = 0.0;
  for (std::size_t t = 0; t < grid.num_points(); ++t) {
    const double m = mu.values(0, t);
    for (std::size_t c = 0; c < n; ++c) e[c] = E.values(c, t);
    // psi(xi) = <e, xi> - m f*(t, xi), concave for m >= 0.
    auto psi = [&](const std::vector<double>& x) {
      const ExtReal fs = intg.conjugate(t, x);
      if (fs.is_infinite()) return -std::numeric_limits<double>::infinity();
      double s = 0.0;
      for (std::size_t c = 0; c < n; ++c) s += e[c] * x[c];
      return s - m * fs.value();
    };
    auto project = [&](std::vector<double>& x) {
      if (nuclear) {
        prox::project_spectral_ball(x, intg.matrix_rows(), intg.matrix_cols(),
                                    intg.spectral_radius());
      }
    };

    double best = psi(std::vector<double>(n, 0.0));
    for (std::size_t sample = 0; sample < n_samples; ++sample) {
      for (double& v : xi) v = normal(rng);
      project(xi);
      double val = psi(xi);
      double step = 1.0;
      for (int it = 0; it < 2000; ++it) {
        if (nuclear) {
          grad = e;
        } else {
          intg.conjugate_gradient(xi, cg);
          for (std::size_t c = 0; c < n; ++c) grad[c] = e[c] - m * cg[c];
        }
        double g2 = 0.0;
        for (double g : grad) g2 += g * g;
        if (g2 == 0.0) break;
        // Armijo backtracking along the projected arc.
        step *= 4.0;
        bool moved = false;
        for (int ls = 0; ls < 80; ++ls) {
          for (std::size_t c = 0; c < n; ++c) trial[c] = xi[c] + step * grad[c];
          project(trial);
          const double tv = psi(trial);
          double d2 = 0.0;
          for (std::size_t c = 0; c < n; ++c) d2 += (trial[c] - xi[c]) * (trial[c] - xi[c]);
          if (tv >= val + 1e-4 * d2 / step && tv > val) {
            xi = trial;
            val = tv;
            moved = true;
            break;
          }
          step *= 0.5;
        }
        if (!moved) break;
      }
      best = std::max(best, val);
    }
    total += grid.cell_volume() * best;
  }
  return total;
}

Field pixel_gradient(const GraphFunction& u, const ProductGrid& grid) {
  u.validate(grid);
  const std::size_t d = grid.domain_dims();
  const std::size_t s = grid.range_dims();
  Field p(grid.num_pixels(), d * s);
  std::vector<std::size_t> idx(d);
  for (std::size_t x = 0; x < grid.num_pixels(); ++x) {
    for (std::size_t i = 0; i < d; ++i) {
      const std::size_t j = grid.pixel_axis_index(x, i);
      if (j + 1 == grid.domain_shape()[i]) continue;
      for (std::size_t a = 0; a < d; ++a) idx[a] = grid.pixel_axis_index(x, a);
      ++idx[i];
      const std::size_t nb = grid.pixel_from_indices(idx);
      for (std::size_t k = 0; k < s; ++k) {
        p(i * s + k, x) = (u.values(k, nb) - u.values(k, x)) / grid.domain_spacing()[i];
      }
    }
  }
  return p;
}

double direct_energy(const GraphFunction& u, const Integrand& intg, const ProductGrid& grid) {
  check_rho(intg, grid);
  const Field p = pixel_gradient(u, grid);
  if (intg.tensor_size() != p.components()) {
    throw DimensionError("direct_energy: integrand tensor must be d x s");
  }
  std::vector<double> q(p.components());
  double total = 0.0;
  for (std::size_t x = 0; x < grid.num_pixels(); ++x) {
    for (std::size_t c = 0; c < q.size(); ++c) q[c] = p(c, x);
    total += intg.value(grid.point(x, nearest_label(u, x, grid)), q);
  }
  return total * grid.pixel_volume();
}

std::pair<ExtReal, double> subgraph_check(const GraphFunction& u, const Integrand& intg,
                                          const ProductGrid& grid) {
  if (grid.range_dims() != 1) throw DimensionError("subgraph_check: scalar range required");
  u.validate(grid);
  const std::size_t L = grid.num_labels();
  const std::size_t d = grid.domain_dims();
  // v(x, l) = 1 for labels at or below the rounded graph.
  Field v = grid.scalar_field();
  for (std::size_t x = 0; x < grid.num_pixels(); ++x) {
    const std::size_t k = nearest_label(u, x, grid);
    for (std::size_t l = 0; l <= k; ++l) v(0, x * L + l) = 1.0;
  }
  LiftedMeasure mu(grid);
  const double hz = grid.range_spacing()[0];
  for (std::size_t x = 0; x < grid.num_pixels(); ++x) {
    for (std::size_t l = 0; l < L; ++l) {
      const double above = l + 1 < L ? v(0, x * L + l + 1) : 0.0;
      mu.values(0, x * L + l) = (v(0, x * L + l) - above) / hz;
    }
  }
  MomentumField E(grid, {d, 1}, grad_x(v, grid));
  return {bb_eval(intg, E, mu), direct_energy(u, intg, grid)};
}

}  // namespace liftkit
