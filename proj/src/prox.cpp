#include "liftkit/prox.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>

#include "liftkit/error.hpp"
#include "liftkit/linalg.hpp"

namespace liftkit::prox {

void project_simplex(std::span<double> v, double mass) {
  const std::size_t k = v.size();
  if (k == 0) throw DimensionError("project_simplex: empty vector");
  if (!(mass > 0.0)) throw RangeError("project_simplex: mass must be positive");
  if (k == 1) {
    v[0] = mass;
    return;
  }
  // Sorting dominates; small label sets use a stack buffer.
  constexpr std::size_t kStack = 64;
  std::array<double, kStack> local;
  std::vector<double> heap;
  double* s = local.data();
  if (k > kStack) {
    heap.resize(k);
    s = heap.data();
  }
  std::copy(v.begin(), v.end(), s);
  std::sort(s, s + k, std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    cumsum += s[j];
    const double t = (cumsum - mass) / static_cast<double>(j + 1);
    if (s[j] - t > 0.0) theta = t;
  }
  for (double& x : v) x = std::max(x - theta, 0.0);
}

void project_spectral_ball(std::span<double> m, std::size_t rows, std::size_t cols,
                           double radius) {
  if (!(radius > 0.0)) throw RangeError("project_spectral_ball: radius must be positive");
  for (double x : m) {
    if (!std::isfinite(x)) throw NumericError("project_spectral_ball: non-finite entry");
  }
  linalg::clip_singular_values(m, rows, cols, radius);
}

void project_quad_epigraph(std::span<double> xi, double& lam, double curvature) {
  const double c = curvature;
  if (!(c > 0.0)) throw RangeError("project_quad_epigraph: curvature must be positive");
  double y2 = 0.0;
  for (double v : xi) y2 += v * v;
  if (!std::isfinite(y2) || !std::isfinite(lam)) {
    throw NumericError("project_quad_epigraph: non-finite input");
  }
  const double l = lam;
  if (0.5 * c * y2 + l <= 0.0) return;
  if (y2 == 0.0) {
    lam = 0.0;
    return;
  }
  // Multiplier nu >= 0: xi' = xi / (1 + c nu), lam' = l - nu, on the boundary.
  // phi is convex and decreasing, so Newton from nu = 0 increases monotonically
  // to the root.
  auto phi = [&](double nu) {
    const double a = 1.0 + c * nu;
    return l - nu + 0.5 * c * y2 / (a * a);
  };
  auto dphi = [&](double nu) {
    const double a = 1.0 + c * nu;
    return -1.0 - c * c * y2 / (a * a * a);
  };
  const double scale = std::max({1.0, std::fabs(l), 0.5 * c * y2});
  double nu = 0.0;
  bool done = false;
  for (int it = 0; it < 64; ++it) {
    const double f = phi(nu);
    if (std::fabs(f) <= 1e-12 * scale) {
      done = true;
      break;
    }
    const double next = nu - f / dphi(nu);
    if (!(next > nu)) {
      done = std::fabs(f) <= 1e-10 * scale;
      break;
    }
    nu = next;
  }
  if (!done) {
    double lo = 0.0;
    double hi = std::max(0.0, l) + 0.5 * c * y2;
    for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      (phi(mid) > 0.0 ? lo : hi) = mid;
    }
    nu = 0.5 * (lo + hi);
    if (!(std::fabs(phi(nu)) <= 1e-9 * scale)) {
      throw NumericError("project_quad_epigraph: root finder did not converge");
    }
  }
  const double a = 1.0 / (1.0 + c * nu);
  for (double& v : xi) v *= a;
  lam = l - nu;
}

void project_psd(std::span<double> m, std::size_t n) {
  if (m.size() != n * n || n == 0) throw DimensionError("project_psd: storage does not match n");
  if (n == 1) {
    m[0] = std::max(m[0], 0.0);
    return;
  }
  if (n == 2) {
    const double a = m[0];
    const double b = 0.5 * (m[1] + m[2]);
    const double c = m[3];
    const double mean = 0.5 * (a + c);
    const double r = std::hypot(0.5 * (a - c), b);
    if (!std::isfinite(r) || !std::isfinite(mean)) throw NumericError("project_psd: non-finite entry");
    const double lo = mean - r;
    const double hi = mean + r;
    if (lo >= 0.0) {
      m[1] = m[2] = b;
    } else if (hi <= 0.0) {
      m[0] = m[1] = m[2] = m[3] = 0.0;
    } else {
      // Rank one: hi * v v^T with v the top eigenvector.
      double vx = b;
      double vy = hi - a;
      if (std::fabs(0.5 * (a - c)) >= std::fabs(b) && a >= c) {
        vx = hi - c;
        vy = b;
      }
      const double nn = vx * vx + vy * vy;
      m[0] = hi * vx * vx / nn;
      m[1] = m[2] = hi * vx * vy / nn;
      m[3] = hi * vy * vy / nn;
    }
    return;
  }
  std::vector<double> values(n), vectors(n * n);
  linalg::symmetric_eigen(m, n, values, vectors);
  for (double v : values) {
    if (!std::isfinite(v)) throw NumericError("project_psd: eigensolver failed");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        if (values[k] > 0.0) s += values[k] * vectors[i * n + k] * vectors[j * n + k];
      }
      m[i * n + j] = s;
    }
  }
  // Exact symmetry of the result.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = 0.5 * (m[i * n + j] + m[j * n + i]);
      m[i * n + j] = s;
      m[j * n + i] = s;
    }
  }
}

void project_block_symmetric(std::span<double> h, std::size_t d, std::size_t s) {
  if (h.size() != d * s * d * s) throw DimensionError("project_block_symmetric: storage");
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < s; ++k) {
        for (std::size_t l = k + 1; l < s; ++l) {
          double& x = h[((i * s + k) * d + j) * s + l];
          double& y = h[((i * s + l) * d + j) * s + k];
          const double avg = 0.5 * (x + y);
          x = avg;
          y = avg;
        }
      }
    }
  }
}

void project_equality(double& a, double& b, double& c) {
  const double r = (a - b - c) / 3.0;
  a -= r;
  b += r;
  c += r;
}

ProjectionSpec ProjectionSpec::simplex(std::string var, std::size_t labels, double mass) {
  ProjectionSpec s;
  s.kind = Kind::Simplex;
  s.variables = {std::move(var)};
  s.shape = {labels};
  s.mass = mass;
  return s;
}

ProjectionSpec ProjectionSpec::nonneg(std::string var) {
  ProjectionSpec s;
  s.kind = Kind::NonNeg;
  s.variables = {std::move(var)};
  s.shape = {1};
  return s;
}

ProjectionSpec ProjectionSpec::upper_bound(std::string var, std::vector<double> bound) {
  ProjectionSpec s;
  s.kind = Kind::UpperBound;
  s.variables = {std::move(var)};
  s.shape = {1};
  s.bound = std::move(bound);
  return s;
}

ProjectionSpec ProjectionSpec::spectral_ball(std::string var, std::size_t rows, std::size_t cols,
                                             double radius) {
  if (!(radius > 0.0)) throw RangeError("ProjectionSpec: spectral ball radius must be positive");
  ProjectionSpec s;
  s.kind = Kind::SpectralBall;
  s.variables = {std::move(var)};
  s.shape = {rows, cols};
  s.radius = radius;
  return s;
}

ProjectionSpec ProjectionSpec::quad_epigraph(std::string xi_var, std::string lam_var,
                                             std::size_t dim, double curvature) {
  ProjectionSpec s;
  s.kind = Kind::QuadEpigraph;
  s.variables = {std::move(xi_var), std::move(lam_var)};
  s.shape = {dim + 1};
  s.curvature = curvature;
  return s;
}

ProjectionSpec ProjectionSpec::psd(std::string var, std::size_t n) {
  ProjectionSpec s;
  s.kind = Kind::PSDCone;
  s.variables = {std::move(var)};
  s.shape = {n, n};
  return s;
}

ProjectionSpec ProjectionSpec::block_symmetric(std::string var, std::size_t d, std::size_t s) {
  ProjectionSpec p;
  p.kind = Kind::BlockSymmetric;
  p.variables = {std::move(var)};
  p.shape = {d, s, d, s};
  return p;
}

ProjectionSpec ProjectionSpec::equality(std::string a, std::string b, std::string c) {
  ProjectionSpec s;
  s.kind = Kind::Equality;
  s.variables = {std::move(a), std::move(b), std::move(c)};
  s.shape = {3};
  return s;
}

std::size_t ProjectionSpec::block_size() const {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

void apply(const ProjectionSpec& spec, std::span<double> block, std::size_t point) {
  if (block.size() != spec.block_size()) throw DimensionError("prox::apply: block size");
  using Kind = ProjectionSpec::Kind;
  switch (spec.kind) {
    case Kind::Simplex:
      project_simplex(block, spec.mass);
      return;
    case Kind::NonNeg:
      for (double& v : block) v = nonneg(v);
      return;
    case Kind::UpperBound:
      block[0] = clip_upper(block[0], spec.bound.at(point));
      return;
    case Kind::SpectralBall:
      project_spectral_ball(block, spec.shape[0], spec.shape[1], spec.radius);
      return;
    case Kind::QuadEpigraph: {
      double& lam = block[block.size() - 1];
      project_quad_epigraph(block.first(block.size() - 1), lam, spec.curvature);
      return;
    }
    case Kind::PSDCone:
      project_psd(block, spec.shape[0]);
      return;
    case Kind::Equality:
      project_equality(block[0], block[1], block[2]);
      return;
    case Kind::BlockSymmetric:
      project_block_symmetric(block, spec.shape[0], spec.shape[1]);
      return;
  }
}

const char* kind_name(ProjectionSpec::Kind kind) {
  using Kind = ProjectionSpec::Kind;
  switch (kind) {
    case Kind::Simplex: return "Simplex";
    case Kind::NonNeg: return "NonNeg";
    case Kind::UpperBound: return "UpperBound";
    case Kind::SpectralBall: return "SpectralBall";
    case Kind::QuadEpigraph: return "QuadEpigraph";
    case Kind::PSDCone: return "PSDCone";
    case Kind::Equality: return "Equality";
    case Kind::BlockSymmetric: return "BlockSymmetric";
  }
  return "?";
}

}  // namespace liftkit::prox
