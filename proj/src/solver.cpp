#include "liftkit/solver.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>

#include "liftkit/error.hpp"
#include "liftkit/linalg.hpp"
#include "liftkit/simd/kernels.hpp"

namespace liftkit {

// ---------------------------------------------------------------- FieldSet

void FieldSet::add(std::string name, Field f) {
  if (contains(name)) throw DimensionError("FieldSet: duplicate field " + name);
  names_.push_back(std::move(name));
  fields_.push_back(std::move(f));
}

std::size_t FieldSet::index(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  throw DimensionError("FieldSet: no field named " + name);
}

bool FieldSet::contains(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::size_t FieldSet::total_size() const {
  std::size_t n = 0;
  for (const auto& f : fields_) n += f.size();
  return n;
}

void FieldSet::fill(double v) {
  for (auto& f : fields_) f.fill(v);
}

bool FieldSet::same_shape(const FieldSet& other) const {
  if (names_ != other.names_) return false;
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    if (!fields_[i].same_shape(other.fields_[i])) return false;
  }
  return true;
}

std::vector<double> FieldSet::flatten() const {
  std::vector<double> out;
  out.reserve(total_size());
  for (const auto& f : fields_) out.insert(out.end(), f.values().begin(), f.values().end());
  return out;
}

void FieldSet::assign(std::span<const double> flat) {
  if (flat.size() != total_size()) throw DimensionError("FieldSet::assign: size mismatch");
  std::size_t off = 0;
  for (auto& f : fields_) {
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(off), f.size(), f.values().begin());
    off += f.size();
  }
}

bool FieldSet::all_finite() const {
  for (const auto& f : fields_) {
    for (double v : f.values()) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

double dot(const FieldSet& a, const FieldSet& b) {
  if (!a.same_shape(b)) throw DimensionError("dot: FieldSet shapes differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += dot(a[i], b[i]);
  return s;
}

double norm2(const FieldSet& a) { return std::sqrt(dot(a, a)); }

const char* problem_kind_name(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::FirstOrder: return "first_order";
    case ProblemKind::Laplacian: return "laplacian";
    case ProblemKind::Harmonic: return "harmonic";
    case ProblemKind::SecondOrder: return "second_order";
  }
  return "?";
}

FieldSet SaddleProblem::make_primal() const {
  FieldSet s;
  for (const auto& [name, comps] : primal_vars) s.add(name, grid.field(comps));
  return s;
}

FieldSet SaddleProblem::make_dual() const {
  FieldSet s;
  for (const auto& [name, comps] : dual_vars) s.add(name, grid.field(comps));
  return s;
}

// ---------------------------------------------------------------- coupling

namespace {

// Fixed positions of the variables; see the assemble_* functions.
constexpr std::size_t kMu = 0, kE = 1, kH = 2;
constexpr std::size_t kLam = 0, kXi = 1;

bool has_h(const SaddleProblem& p) { return p.continuity != ContinuityKind::FirstOrder; }
std::size_t r_index(const SaddleProblem& p) { return has_h(p) ? 3 : 2; }
std::size_t q_index(const SaddleProblem& p) { return p.split ? 4 : 2; }

void copy_into(Field& dst, const Field& src) {
  std::copy(src.values().begin(), src.values().end(), dst.values().begin());
}

void add_into(Field& dst, const Field& src, double s) {
  simd::active().scale_acc(dst.values().data(), src.values().data(), s, dst.size());
}

}  // namespace

void apply_coupling(const SaddleProblem& p, const FieldSet& x, FieldSet& y) {
  const Field& mu = x[kMu];
  const Field& E = x[kE];
  Field& q = y[q_index(p)];
  copy_into(y[kLam], mu);
  copy_into(y[kXi], E);
  if (p.split) {
    const Field& r = x[r_index(p)];
    add_into(y[kLam], r, 1.0);
    simd::active().scale(y[2].values().data(), r.values().data(), -1.0, r.size());
    simd::active().scale(y[3].values().data(), r.values().data(), -1.0, r.size());
  }
  switch (p.continuity) {
    case ContinuityKind::FirstOrder:
      residual_first_into(mu, E, p.grid, q);
      simd::active().scale(q.values().data(), q.values().data(), -1.0, q.size());
      break;
    case ContinuityKind::SecondOrder:
      residual_second_into(mu, E, x[kH], p.grid, q);
      break;
    case ContinuityKind::Laplacian:
      residual_laplace_into(mu, E, x[kH], p.grid, q);
      break;
  }
}

void apply_coupling_adjoint(const SaddleProblem& p, const FieldSet& y, FieldSet& x) {
  const Field& q = y[q_index(p)];
  Field& mu = x[kMu];
  Field& E = x[kE];
  switch (p.continuity) {
    case ContinuityKind::FirstOrder:
      adjoint_first_into(q, p.grid, mu, E);
      break;
    case ContinuityKind::SecondOrder:
      adjoint_second_into(q, p.grid, mu, E, x[kH]);
      break;
    case ContinuityKind::Laplacian:
      adjoint_laplace_into(q, p.grid, mu, E, x[kH]);
      break;
  }
  if (p.adjoint_perturbation != 0.0) {
    const double f = 1.0 + p.adjoint_perturbation;
    for (std::size_t i = 0; i < (has_h(p) ? 3u : 2u); ++i) {
      simd::active().scale(x[i].values().data(), x[i].values().data(), f, x[i].size());
    }
  }
  add_into(mu, y[kLam], 1.0);
  add_into(E, y[kXi], 1.0);
  if (p.split) {
    Field& r = x[r_index(p)];
    copy_into(r, y[kLam]);
    add_into(r, y[2], -1.0);
    add_into(r, y[3], -1.0);
  }
}

double adjoint_mismatch(const SaddleProblem& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  FieldSet x = p.make_primal();
  FieldSet y = p.make_dual();
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (double& v : x[i].values()) v = dist(rng);
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (double& v : y[i].values()) v = dist(rng);
  }
  FieldSet kx = p.make_dual();
  FieldSet kty = p.make_primal();
  apply_coupling(p, x, kx);
  apply_coupling_adjoint(p, y, kty);
  const double scale = norm2(kx) * norm2(y) + norm2(x) * norm2(kty);
  return std::fabs(dot(kx, y) - dot(x, kty)) / scale;
}

// ---------------------------------------------------------------- projections

namespace {

void apply_spec(const prox::ProjectionSpec& spec, FieldSet& fs, const ProductGrid& grid) {
  using Kind = prox::ProjectionSpec::Kind;
  const auto& k = simd::active();
  switch (spec.kind) {
    case Kind::Simplex: {
      Field& f = fs.at(spec.variables.at(0));
      const std::size_t labels = spec.shape.at(0);
      auto v = f.component(0);
      for (std::size_t x = 0; x < grid.num_pixels(); ++x) {
        prox::project_simplex(v.subspan(x * labels, labels), spec.mass);
      }
      return;
    }
    case Kind::NonNeg: {
      Field& f = fs.at(spec.variables.at(0));
      k.clip_nonneg(f.values().data(), f.size());
      return;
    }
    case Kind::UpperBound: {
      Field& f = fs.at(spec.variables.at(0));
      k.clip_upper(f.values().data(), spec.bound.data(), f.points());
      return;
    }
    default:
      break;
  }
  // Pointwise blocks gathered across the components of the named variables.
  std::array<double*, 64> cols;
  std::size_t width = 0;
  for (const auto& name : spec.variables) {
    Field& f = fs.at(name);
    for (std::size_t c = 0; c < f.components(); ++c) {
      if (width == cols.size()) throw DimensionError("projection block is too wide");
      cols[width++] = f.component(c).data();
    }
  }
  if (width != spec.block_size()) throw DimensionError("projection block does not match variables");
  std::array<double, 64> buf;
  const std::span<double> block(buf.data(), width);
  for (std::size_t t = 0; t < grid.num_points(); ++t) {
    for (std::size_t j = 0; j < width; ++j) buf[j] = cols[j][t];
    prox::apply(spec, block, t);
    for (std::size_t j = 0; j < width; ++j) cols[j][t] = buf[j];
  }
}

}  // namespace

void project_primal(const SaddleProblem& p, FieldSet& x) {
  for (const auto& spec : p.primal_constraints) apply_spec(spec, x, p.grid);
  if (p.boundary_mass) {
    Field& mu = x[kMu];
    const std::size_t labels = p.grid.num_labels();
    for (std::size_t px = 0; px < p.grid.num_pixels(); ++px) {
      if (!p.grid.pixel_on_boundary(px)) continue;
      for (std::size_t l = 0; l < labels; ++l) {
        const std::size_t t = p.grid.point(px, l);
        mu(0, t) = (*p.boundary_mass)(0, t);
      }
    }
  }
}

void project_dual(const SaddleProblem& p, FieldSet& y) {
  for (const auto& spec : p.dual_constraints) apply_spec(spec, y, p.grid);
}

// ---------------------------------------------------------------- assembly

namespace {

std::vector<double> resolve_cost(const ProductGrid& grid, const Integrand& intg,
                                 std::vector<double> cost) {
  if (cost.empty()) {
    cost.resize(grid.num_points());
    if (intg.num_points() != 1 && intg.num_points() != grid.num_points()) {
      throw DimensionError("assemble: integrand rho does not match the grid");
    }
    for (std::size_t t = 0; t < cost.size(); ++t) cost[t] = intg.rho(t);
  }
  if (cost.size() != grid.num_points()) throw DimensionError("assemble: cost volume size");
  for (double v : cost) {
    if (!std::isfinite(v)) throw RangeError("assemble: cost volume must be finite");
  }
  return cost;
}

void check_adjoint(SaddleProblem& p) {
  p.adjoint_error = adjoint_mismatch(p, 0x5eed);
  if (!(p.adjoint_error <= 1e-10)) {
    throw NumericError("assemble: coupling failed its adjoint check");
  }
}

// Shared layout of the data-driven problems.
SaddleProblem make_data_problem(ProblemKind kind, ContinuityKind cont, const ProductGrid& grid,
                                const Integrand& intg, std::vector<double> cost) {
  SaddleProblem p(grid);
  p.kind = kind;
  p.continuity = cont;
  p.regularizer = intg.kind();
  p.tensor_dims = intg.tensor_dims();
  p.weight = intg.weight();
  p.cost = resolve_cost(grid, intg, std::move(cost));
  const ContinuityOperator op(cont, grid);
  if (intg.tensor_size() != op.momentum_components()) {
    throw DimensionError("assemble: integrand tensor does not match the momentum shape");
  }
  p.split = intg.kind() == RegularizerKind::SquaredL2Half;

  p.primal_vars = {{"mu", 1}, {"E", op.momentum_components()}};
  if (cont != ContinuityKind::FirstOrder) p.primal_vars.emplace_back("H", op.hessian_components());
  if (p.split) p.primal_vars.emplace_back("r", 1);
  p.dual_vars = {{"phi_lambda", 1}, {"phi_xi", op.momentum_components()}};
  if (p.split) {
    p.dual_vars.emplace_back("phi_lambda1", 1);
    p.dual_vars.emplace_back("phi_lambda2", 1);
  }
  p.dual_vars.emplace_back("q", op.dual_components());

  if (p.split) {
    p.dual_constraints.push_back(prox::ProjectionSpec::upper_bound("phi_lambda1", p.cost));
    p.dual_constraints.push_back(prox::ProjectionSpec::quad_epigraph(
        "phi_xi", "phi_lambda2", op.momentum_components(), 1.0 / p.weight));
  } else {
    p.dual_constraints.push_back(prox::ProjectionSpec::upper_bound("phi_lambda", p.cost));
    p.dual_constraints.push_back(prox::ProjectionSpec::spectral_ball(
        "phi_xi", intg.matrix_rows(), intg.matrix_cols(), p.weight));
  }
  p.primal_constraints.push_back(prox::ProjectionSpec::simplex("mu", grid.num_labels(), 1.0));
  if (cont == ContinuityKind::Laplacian) {
    p.primal_constraints.push_back(prox::ProjectionSpec::psd("H", grid.range_dims()));
  } else if (cont == ContinuityKind::SecondOrder) {
    p.primal_constraints.push_back(
        prox::ProjectionSpec::block_symmetric("H", grid.domain_dims(), grid.range_dims()));
  }
  check_adjoint(p);
  return p;
}

}  // namespace

SaddleProblem assemble_first_order(const ProductGrid& grid, const Integrand& intg,
                                   std::vector<double> cost) {
  if (intg.kind() != RegularizerKind::NuclearNorm) {
    throw UnsupportedConfigurationError(
        "assemble_first_order: the decoupled dual constraints need a NuclearNorm regularizer");
  }
  return make_data_problem(ProblemKind::FirstOrder, ContinuityKind::FirstOrder, grid, intg,
                           std::move(cost));
}

SaddleProblem assemble_laplacian(const ProductGrid& grid, const Integrand& intg,
                                 std::vector<double> cost) {
  if (intg.kind() != RegularizerKind::SquaredL2Half) {
    throw UnsupportedConfigurationError(
        "assemble_laplacian: the epigraph split needs a SquaredL2Half regularizer");
  }
  return make_data_problem(ProblemKind::Laplacian, ContinuityKind::Laplacian, grid, intg,
                           std::move(cost));
}

SaddleProblem assemble_second_order(const ProductGrid& grid, const Integrand& intg,
                                    std::vector<double> cost) {
  if (intg.kind() == RegularizerKind::PowerCost) {
    throw UnsupportedConfigurationError(
        "assemble_second_order: PowerCost has no projection-friendly dual constraint");
  }
  return make_data_problem(ProblemKind::SecondOrder, ContinuityKind::SecondOrder, grid, intg,
                           std::move(cost));
}

SaddleProblem assemble_harmonic(const ProductGrid& grid, const LiftedMeasure& boundary,
                                double weight) {
  if (!(weight > 0.0)) throw RangeError("assemble_harmonic: weight must be positive");
  if (boundary.values.points() != grid.num_points() || boundary.values.components() != 1) {
    throw DimensionError("assemble_harmonic: boundary measure does not match the grid");
  }
  const std::size_t d = grid.domain_dims();
  const std::size_t s = grid.range_dims();
  const double lv = grid.label_volume();
  Field mass = grid.scalar_field();
  for (std::size_t x = 0; x < grid.num_pixels(); ++x) {
    if (!grid.pixel_on_boundary(x)) continue;
    double total = 0.0;
    for (std::size_t l = 0; l < grid.num_labels(); ++l) {
      const std::size_t t = grid.point(x, l);
      const double m = boundary.values(0, t) * lv;
      if (!std::isfinite(m) || m < -1e-8) {
        throw InfeasibleError("assemble_harmonic: negative boundary mass at pixel " +
                              std::to_string(x));
      }
      mass(0, t) = std::max(m, 0.0);
      total += mass(0, t);
    }
    if (std::fabs(total - 1.0) > 1e-8) {
      throw InfeasibleError("assemble_harmonic: boundary pixel " + std::to_string(x) +
                            " does not carry unit mass");
    }
    for (std::size_t l = 0; l < grid.num_labels(); ++l) mass(0, grid.point(x, l)) /= total;
  }

  SaddleProblem p(grid);
  p.kind = ProblemKind::Harmonic;
  p.continuity = ContinuityKind::FirstOrder;
  p.regularizer = RegularizerKind::SquaredL2Half;
  p.tensor_dims = {d, s};
  p.weight = weight;
  p.primal_vars = {{"mu", 1}, {"E", d * s}};
  p.dual_vars = {{"phi_lambda", 1}, {"phi_xi", d * s}, {"q", d}};
  p.primal_constraints.push_back(prox::ProjectionSpec::simplex("mu", grid.num_labels(), 1.0));
  p.dual_constraints.push_back(
      prox::ProjectionSpec::quad_epigraph("phi_xi", "phi_lambda", d * s, 1.0 / weight));
  p.boundary_mass = std::move(mass);
  check_adjoint(p);
  return p;
}

// ---------------------------------------------------------------- operator norm

double estimate_opnorm(const LinearOperator& op, int iters, std::uint64_t seed,
                       std::vector<double>* history) {
  if (iters < 10) throw RangeError("estimate_opnorm: need at least 10 iterations");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> x(op.in_size), kx(op.out_size), ktkx(op.in_size);
  for (double& v : x) v = dist(rng);
  auto norm = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double a : v) s += a * a;
    return std::sqrt(s);
  };
  double best = 0.0;
  if (history) history->clear();
  for (int it = 0; it < iters; ++it) {
    const double nx = norm(x);
    if (nx == 0.0) break;
    for (double& v : x) v /= nx;
    op.apply(x, kx);
    best = std::max(best, norm(kx));  // Rayleigh quotient of K^T K is |K x|^2
    if (history) history->push_back(1.05 * best);
    op.apply_adjoint(kx, ktkx);
    x.swap(ktkx);
  }
  return 1.05 * best;
}

double estimate_opnorm(const SaddleProblem& p, int iters, std::uint64_t seed,
                       std::vector<double>* history) {
  FieldSet x = p.make_primal();
  FieldSet y = p.make_dual();
  LinearOperator op;
  op.in_size = x.total_size();
  op.out_size = y.total_size();
  op.apply = [&](std::span<const double> in, std::span<double> out) {
    x.assign(in);
    apply_coupling(p, x, y);
    const auto flat = y.flatten();
    std::copy(flat.begin(), flat.end(), out.begin());
  };
  op.apply_adjoint = [&](std::span<const double> in, std::span<double> out) {
    y.assign(in);
    apply_coupling_adjoint(p, y, x);
    const auto flat = x.flatten();
    std::copy(flat.begin(), flat.end(), out.begin());
  };
  return estimate_opnorm(op, iters, seed, history);
}

// ---------------------------------------------------------------- diagnostics

double primal_energy(const SaddleProblem& p, const FieldSet& x) {
  const Field& mu = x[kMu];
  const Field& E = x[kE];
  const std::size_t n = E.components();
  std::size_t rows = 1;
  for (std::size_t i = 0; i + 1 < p.tensor_dims.size(); ++i) rows *= p.tensor_dims[i];
  const std::size_t cols = p.tensor_dims.empty() ? 1 : p.tensor_dims.back();
  std::vector<double> e(n);
  double total = 0.0;
  for (std::size_t t = 0; t < p.grid.num_points(); ++t) {
    const double m = mu(0, t);
    if (!p.cost.empty()) total += m * p.cost[t];
    double sq = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      e[c] = E(c, t);
      sq += e[c] * e[c];
    }
    if (sq == 0.0) continue;
    switch (p.regularizer) {
      case RegularizerKind::NuclearNorm:
        if (rows == 1 || cols == 1) {
          total += p.weight * std::sqrt(sq);
        } else if (rows == 2 && cols == 2) {
          const double det = e[0] * e[3] - e[1] * e[2];
          total += p.weight * std::sqrt(sq + 2.0 * std::fabs(det));
        } else {
          total += p.weight * linalg::nuclear_norm(e, rows, cols);
        }
        break;
      case RegularizerKind::SquaredL2Half:
      case RegularizerKind::PowerCost:
        total += p.weight * sq / (2.0 * std::max(m, kEnergyMassFloor));
        break;
    }
  }
  return total * p.grid.pixel_volume();
}

double continuity_residual(const SaddleProblem& p, const FieldSet& x) {
  const ContinuityOperator op(p.continuity, p.grid);
  Field r = p.grid.field(op.dual_components());
  switch (p.continuity) {
    case ContinuityKind::FirstOrder:
      residual_first_into(x[kMu], x[kE], p.grid, r);
      break;
    case ContinuityKind::SecondOrder:
      residual_second_into(x[kMu], x[kE], x[kH], p.grid, r);
      break;
    case ContinuityKind::Laplacian:
      residual_laplace_into(x[kMu], x[kE], x[kH], p.grid, r);
      break;
  }
  return max_abs(r);
}

std::vector<std::pair<std::string, double>> constraint_violations(const SaddleProblem& p,
                                                                  const FieldSet& x) {
  std::vector<std::pair<std::string, double>> out;
  if (p.split) {
    // Stationarity in phi_lambda forces r = -mu.
    Field s = x[kMu];
    add_into(s, x[r_index(p)], 1.0);
    out.emplace_back("mu_plus_r", max_abs(s));
  }
  return out;
}

// ---------------------------------------------------------------- solve

void SolveReport::write_csv(std::ostream& os) const {
  os << "iteration,energy,residual,violation\n";
  const auto old = os.precision(17);
  for (const auto& c : history) {
    os << c.iteration << ',' << c.energy << ',' << c.residual << ',' << c.violation << '\n';
  }
  os.precision(old);
}

namespace {

Checkpoint evaluate(const SaddleProblem& p, const FieldSet& x, int iteration) {
  Checkpoint c;
  c.iteration = iteration;
  c.energy = primal_energy(p, x);
  c.residual = continuity_residual(p, x);
  for (const auto& [name, v] : constraint_violations(p, x)) c.violation = std::max(c.violation, v);
  return c;
}

}  // namespace

SolveResult solve(const SaddleProblem& p, const SolverConfig& cfg, const FieldSet* warm_start) {
  const auto start = std::chrono::steady_clock::now();
  if (cfg.max_iters < 0 || cfg.check_every < 1) throw RangeError("solve: bad iteration limits");
  if (!(cfg.theta >= 0.0 && cfg.theta <= 1.0)) throw RangeError("solve: theta must be in [0, 1]");
  if (cfg.tau < 0.0 || cfg.sigma < 0.0) throw RangeError("solve: negative step size");

  SolveResult res{p.make_primal(), p.make_dual(), {}};
  SolveReport& rep = res.report;
  FieldSet& x = res.primal;
  FieldSet& y = res.dual;
  if (warm_start) {
    if (!warm_start->same_shape(x)) throw DimensionError("solve: warm start shape");
    x = *warm_start;
  } else {
    x[kMu].fill(1.0 / static_cast<double>(p.grid.num_labels()));
  }
  project_primal(p, x);

  rep.opnorm = estimate_opnorm(p, std::max(cfg.opnorm_iters, 10), cfg.seed);
  if (cfg.tau > 0.0 && cfg.sigma > 0.0) {
    rep.tau = cfg.tau;
    rep.sigma = cfg.sigma;
    if (rep.tau * rep.sigma * rep.opnorm * rep.opnorm > 1.0 + 1e-12) {
      throw RangeError("solve: tau * sigma * ||K||^2 exceeds 1");
    }
  } else {
    if (!(cfg.step_balance > 0.0)) throw RangeError("solve: step_balance must be positive");
    rep.tau = 1.0 / (cfg.step_balance * rep.opnorm);
    rep.sigma = cfg.step_balance / rep.opnorm;
  }

  FieldSet xbar = x;
  FieldSet x_old = x;
  FieldSet kx = p.make_dual();
  FieldSet kty = p.make_primal();
  const auto& k = simd::active();

  rep.history.push_back(evaluate(p, x, 0));
  int it = 0;
  try {
    while (it < cfg.max_iters) {
      ++it;
      apply_coupling(p, xbar, kx);
      for (std::size_t i = 0; i < y.size(); ++i) {
        k.scale_acc(y[i].values().data(), kx[i].values().data(), rep.sigma, y[i].size());
      }
      project_dual(p, y);
      apply_coupling_adjoint(p, y, kty);
      for (std::size_t i = 0; i < x.size(); ++i) {
        copy_into(x_old[i], x[i]);
        k.scale_acc(x[i].values().data(), kty[i].values().data(), -rep.tau, x[i].size());
      }
      project_primal(p, x);
      for (std::size_t i = 0; i < x.size(); ++i) {
        k.extrapolate(xbar[i].values().data(), x[i].values().data(), x_old[i].values().data(),
                      cfg.theta, x[i].size());
      }
      if (it % cfg.check_every != 0 && it != cfg.max_iters) continue;
      if (!x.all_finite() || !y.all_finite()) {
        throw DivergenceError("solve: non-finite iterate", static_cast<std::size_t>(it));
      }
      const Checkpoint c = evaluate(p, x, it);
      const Checkpoint prev = rep.history.back();
      if (!std::isfinite(c.energy)) {
        throw DivergenceError("solve: non-finite energy", static_cast<std::size_t>(it));
      }
      if (prev.iteration >= 100 &&
          c.energy > prev.energy + 1e-6 * std::max(std::fabs(prev.energy), 1e-12)) {
        rep.energy_monotone = false;
      }
      rep.history.push_back(c);
      const bool feasible = c.residual <= cfg.tol_feas && c.violation <= cfg.tol_feas;
      const bool stalled = std::fabs(c.energy - prev.energy) <=
                           cfg.tol_gap * std::max(std::fabs(c.energy), 1e-12);
      if (feasible && stalled) {
        rep.converged = true;
        break;
      }
    }
  } catch (const NumericError& e) {
    throw DivergenceError(std::string("solve: ") + e.what(), static_cast<std::size_t>(it));
  }

  rep.iterations = it;
  const Checkpoint& last = rep.history.back();
  if (last.iteration != it) rep.history.push_back(evaluate(p, x, it));
  rep.energy = rep.history.back().energy;
  rep.residual = rep.history.back().residual;
  rep.violations = constraint_violations(p, x);
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

LiftedMeasure lifted_measure(const SaddleProblem& p, const FieldSet& x) {
  Field density = x[kMu];
  const double inv = 1.0 / p.grid.label_volume();
  for (double& v : density.values()) v *= inv;
  return LiftedMeasure(p.grid, std::move(density));
}

}  // namespace liftkit
