#include "liftkit/verify/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "liftkit/error.hpp"

namespace liftkit::oracle {
namespace {

double dotv(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Solves A x = b by Gaussian elimination with partial pivoting. Returns false
// when A is numerically singular.
bool solve_dense(std::vector<double> a, std::vector<double> b, std::size_t n,
                 std::vector<double>& x) {
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::fabs(a[r * n + c]) > std::fabs(a[piv * n + c])) piv = r;
    }
    if (std::fabs(a[piv * n + c]) < 1e-300) return false;
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
      std::swap(b[c], b[piv]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / a[c * n + c];
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
      b[r] -= f * b[c];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t k = r + 1; k < n; ++k) s -= a[r * n + k] * x[k];
    x[r] = s / a[r * n + r];
  }
  return true;
}

}  // namespace

void jacobi_eigen(std::span<const double> m, std::size_t n, std::vector<double>& values,
                  std::vector<double>& vectors) {
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = 0.5 * (m[i * n + j] + m[j * n + i]);
  }
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) off += a[i * n + j] * a[i * n + j];
    }
    if (off < 1e-300) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p];
          const double akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k];
          const double aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p];
          const double vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a[x * n + x] < a[y * n + y]; });
  values.resize(n);
  vectors.assign(n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    values[k] = a[order[k] * n + order[k]];
    for (std::size_t i = 0; i < n; ++i) vectors[i * n + k] = v[i * n + order[k]];
  }
}

std::vector<double> project_polyhedron(std::span<const double> p,
                                       const std::vector<Halfspace>& cuts,
                                       std::size_t max_sweeps, double tol) {
  std::vector<double> x(p.begin(), p.end());
  std::vector<double> lambda(cuts.size(), 0.0);
  std::vector<double> norms(cuts.size());
  for (std::size_t i = 0; i < cuts.size(); ++i) norms[i] = dotv(cuts[i].a, cuts[i].a);
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double change = 0.0;
    for (std::size_t i = 0; i < cuts.size(); ++i) {
      if (norms[i] == 0.0) continue;
      const double delta = (dotv(cuts[i].a, x) - cuts[i].b) / norms[i];
      const double next = std::max(0.0, lambda[i] + delta);
      const double step = next - lambda[i];
      if (step == 0.0) continue;
      lambda[i] = next;
      for (std::size_t k = 0; k < x.size(); ++k) x[k] -= step * cuts[i].a[k];
      change = std::max(change, std::fabs(step) * std::sqrt(norms[i]));
    }
    if (change <= tol) break;
  }
  return x;
}

std::vector<double> simplex(std::span<const double> v, double mass) {
  const std::size_t k = v.size();
  std::vector<double> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (mask & (std::size_t{1} << i)) {
        sum += v[i];
        ++count;
      }
    }
    // Minimizer on the affine hull of the face.
    const double shift = (sum - mass) / static_cast<double>(count);
    std::vector<double> w(k, 0.0);
    bool ok = true;
    for (std::size_t i = 0; i < k; ++i) {
      if (mask & (std::size_t{1} << i)) {
        w[i] = v[i] - shift;
        if (w[i] < 0.0) ok = false;
      }
    }
    if (!ok) continue;
    double dist = 0.0;
    for (std::size_t i = 0; i < k; ++i) dist += (w[i] - v[i]) * (w[i] - v[i]);
    if (dist < best_dist) {
      best_dist = dist;
      best = w;
    }
  }
  return best;
}

std::vector<double> spectral_ball(std::span<const double> m, std::size_t rows, std::size_t cols,
                                  double radius) {
  std::vector<double> x(m.begin(), m.end());
  std::vector<Halfspace> cuts;
  for (int round = 0; round < 5000; ++round) {
    // Gram matrix X^T X and its eigenpairs give the singular pairs of X.
    std::vector<double> gram(cols * cols, 0.0);
    for (std::size_t i = 0; i < cols; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        double s = 0.0;
        for (std::size_t r = 0; r < rows; ++r) s += x[r * cols + i] * x[r * cols + j];
        gram[i * cols + j] = s;
      }
    }
    std::vector<double> values, vectors;
    jacobi_eigen(gram, cols, values, vectors);
    bool violated = false;
    for (std::size_t k = 0; k < cols; ++k) {
      const double sigma = std::sqrt(std::max(values[k], 0.0));
      if (sigma <= radius * (1.0 + 1e-13)) continue;
      violated = true;
      std::vector<double> u(rows, 0.0);
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < cols; ++j) u[r] += x[r * cols + j] * vectors[j * cols + k];
        u[r] /= sigma;
      }
      Halfspace h;
      h.a.resize(rows * cols);
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < cols; ++j) h.a[r * cols + j] = u[r] * vectors[j * cols + k];
      }
      h.b = radius;
      cuts.push_back(std::move(h));
    }
    if (!violated) return x;
    x = project_polyhedron(m, cuts);
  }
  throw NumericError("oracle::spectral_ball: cutting planes did not converge");
}

std::vector<double> psd(std::span<const double> m, std::size_t n) {
  std::vector<double> sym(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) sym[i * n + j] = 0.5 * (m[i * n + j] + m[j * n + i]);
  }
  std::vector<double> x = sym;
  std::vector<Halfspace> cuts;
  for (int round = 0; round < 5000; ++round) {
    std::vector<double> values, vectors;
    jacobi_eigen(x, n, values, vectors);
    bool violated = false;
    for (std::size_t k = 0; k < n; ++k) {
      if (values[k] >= -1e-14) continue;
      violated = true;
      Halfspace h;
      h.a.resize(n * n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) h.a[i * n + j] = -vectors[i * n + k] * vectors[j * n + k];
      }
      cuts.push_back(std::move(h));
    }
    if (!violated) return x;
    x = project_polyhedron(sym, cuts);
  }
  throw NumericError("oracle::psd: cutting planes did not converge");
}

std::vector<double> quad_epigraph(std::span<const double> xi, double lam, double curvature) {
  const std::size_t s = xi.size();
  const double c = curvature;
  std::vector<double> out(xi.begin(), xi.end());
  out.push_back(lam);
  if (0.5 * c * dotv(xi, xi) + lam <= 0.0) return out;

  // g(y) = |y - xi|^2 + (lam + c/2 |y|^2)^2, the squared distance to the
  // boundary point (y, -c/2 |y|^2).
  auto objective = [&](const std::vector<double>& y) {
    double d = 0.0;
    for (std::size_t i = 0; i < s; ++i) d += (y[i] - xi[i]) * (y[i] - xi[i]);
    const double e = lam + 0.5 * c * dotv(y, y);
    return d + e * e;
  };

  std::mt19937_64 rng(1234);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> starts;
  for (double t : {1.0, 0.0, 0.5, 0.25, 2.0, -1.0}) {
    std::vector<double> y(s);
    for (std::size_t i = 0; i < s; ++i) y[i] = t * xi[i];
    starts.push_back(y);
  }
  for (int k = 0; k < 8; ++k) {
    std::vector<double> y(s);
    for (double& v : y) v = normal(rng);
    starts.push_back(y);
  }

  std::vector<double> best;
  double best_val = std::numeric_limits<double>::infinity();
  for (auto y : starts) {
    double val = objective(y);
    for (int it = 0; it < 500; ++it) {
      const double e = lam + 0.5 * c * dotv(y, y);
      std::vector<double> grad(s), hess(s * s);
      for (std::size_t i = 0; i < s; ++i) grad[i] = 2.0 * (y[i] - xi[i]) + 2.0 * c * e * y[i];
      for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t j = 0; j < s; ++j) {
          hess[i * s + j] = 2.0 * c * c * y[i] * y[j] + (i == j ? 2.0 + 2.0 * c * e : 0.0);
        }
      }
      std::vector<double> dir;
      std::vector<double> neg(grad);
      for (double& v : neg) v = -v;
      if (!solve_dense(hess, neg, s, dir) || dotv(dir, grad) >= 0.0) dir = neg;
      double step = 1.0;
      std::vector<double> trial(s);
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        for (std::size_t i = 0; i < s; ++i) trial[i] = y[i] + step * dir[i];
        const double tv = objective(trial);
        if (tv < val) {
          y = trial;
          val = tv;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    if (val < best_val) {
      best_val = val;
      best = y;
    }
  }
  out.assign(best.begin(), best.end());
  out.push_back(-0.5 * c * dotv(best, best));
  return out;
}

std::vector<double> equality(double a, double b, double c) {
  const std::vector<double> p{a, b, c};
  std::vector<Halfspace> cuts{{{1.0, -1.0, -1.0}, 0.0}, {{-1.0, 1.0, 1.0}, 0.0}};
  return project_polyhedron(p, cuts);
}

std::vector<double> tv_l2_1d(std::span<const double> g, double kappa, std::size_t iters) {
  const std::size_t n = g.size();
  if (n < 2) return {g.begin(), g.end()};
  // Dual: max_{|p| <= kappa} <p, Dg> - |D^T p|^2 / 4, primal u = g - D^T p / 2.
  auto dt = [&](const std::vector<double>& p, std::vector<double>& out) {
    out.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      out[i] -= p[i];
      out[i + 1] += p[i];
    }
  };
  std::vector<double> p(n - 1, 0.0), y(p), prev(p), dtp;
  double t = 1.0;
  const double step = 0.5;  // 1 / L with L = |D D^T| / 2 <= 2
  for (std::size_t it = 0; it < iters; ++it) {
    dt(y, dtp);
    prev = p;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      // Gradient of the negated dual: D (D^T y) / 2 - D g.
      const double grad = 0.5 * (dtp[i + 1] - dtp[i]) - (g[i + 1] - g[i]);
      p[i] = std::clamp(y[i] - step * grad, -kappa, kappa);
    }
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    for (std::size_t i = 0; i + 1 < n; ++i) y[i] = p[i] + (t - 1.0) / tn * (p[i] - prev[i]);
    t = tn;
  }
  dt(p, dtp);
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = g[i] - 0.5 * dtp[i];
  return u;
}

}  // namespace liftkit::oracle
