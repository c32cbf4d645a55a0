#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "liftkit/continuity.hpp"
#include "liftkit/field.hpp"
#include "liftkit/grid.hpp"
#include "liftkit/integrand.hpp"
#include "liftkit/lifted.hpp"
#include "liftkit/prox.hpp"

namespace liftkit {

/// Named fields over one grid, in a fixed order.
class FieldSet {
 public:
  FieldSet() = default;

  void add(std::string name, Field f);
  std::size_t size() const noexcept { return fields_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  /// Index of `name`; throws DimensionError if absent.
  std::size_t index(const std::string& name) const;
  bool contains(const std::string& name) const;

  Field& operator[](std::size_t i) { return fields_.at(i); }
  const Field& operator[](std::size_t i) const { return fields_.at(i); }
  Field& at(const std::string& name) { return fields_[index(name)]; }
  const Field& at(const std::string& name) const { return fields_[index(name)]; }

  std::size_t total_size() const;
  void fill(double v);
  bool same_shape(const FieldSet& other) const;
  /// Concatenated values in field order.
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);
  bool all_finite() const;

 private:
  std::vector<std::string> names_;
  std::vector<Field> fields_;
};

double dot(const FieldSet& a, const FieldSet& b);
double norm2(const FieldSet& a);

enum class ProblemKind { FirstOrder, Laplacian, Harmonic, SecondOrder };

const char* problem_kind_name(ProblemKind kind);

/// A discrete saddle-point problem
///   min_x max_y <K x, y>  s.t.  x in C_P, y in C_D
/// whose coupling K is a continuity adjoint pair plus identity blocks.
///
/// Primal variables: mu (mass per point, sums to 1 over the labels of a pixel),
/// E, optionally H and the multiplier r. Dual variables: phi_lambda, phi_xi,
/// optionally phi_lambda1 and phi_lambda2, and q. The bilinear form is
///   sum_t mu (phi_lambda + A_mu q) + <E, phi_xi + A_E q> + <H, A_H q>
///         + r (phi_lambda - phi_lambda1 - phi_lambda2)
/// with (A_mu, A_E, A_H) the continuity adjoint of `continuity`.
struct SaddleProblem {
  ProblemKind kind = ProblemKind::FirstOrder;
  ContinuityKind continuity = ContinuityKind::FirstOrder;
  ProductGrid grid;
  /// Regularizer eta (its rho is unused; the cost volume carries the data).
  RegularizerKind regularizer = RegularizerKind::NuclearNorm;
  std::vector<std::size_t> tensor_dims;
  double weight = 1.0;
  /// rho per grid point; empty for the harmonic problem.
  std::vector<double> cost;
  /// With the multiplier r and the split data/regularizer duals.
  bool split = false;

  std::vector<std::pair<std::string, std::size_t>> primal_vars;
  std::vector<std::pair<std::string, std::size_t>> dual_vars;
  std::vector<prox::ProjectionSpec> primal_constraints;
  std::vector<prox::ProjectionSpec> dual_constraints;

  /// Pinned mu masses on boundary pixels (harmonic problem), one per point.
  std::optional<Field> boundary_mass;

  /// Relative adjoint error measured at assembly.
  double adjoint_error = 0.0;
  /// Test hook: scales the q contribution of K^T by (1 + perturbation).
  double adjoint_perturbation = 0.0;

  explicit SaddleProblem(ProductGrid g) : grid(std::move(g)) {}

  FieldSet make_primal() const;
  FieldSet make_dual() const;
};

/// y = K x.
void apply_coupling(const SaddleProblem& p, const FieldSet& x, FieldSet& y);
/// x = K^T y.
void apply_coupling_adjoint(const SaddleProblem& p, const FieldSet& y, FieldSet& x);

/// |<K x, y> - <x, K^T y>| / (|K x| |y| + |x| |K^T y|) on random x, y.
double adjoint_mismatch(const SaddleProblem& p, std::uint64_t seed);

/// Applies every primal (resp. dual) projection in place, then the boundary
/// pinning for the primal side.
void project_primal(const SaddleProblem& p, FieldSet& x);
void project_dual(const SaddleProblem& p, FieldSet& y);

/// TV-type problem: NuclearNorm regularizer with weight w gives
/// phi_lambda <= rho, ||phi_xi||_sigma <= w, mu in the label simplex.
/// `cost` holds rho per point; if empty the integrand's rho samples are used.
/// Throws UnsupportedConfigurationError for other regularizers and
/// NumericError if the assembled coupling fails its adjoint check.
SaddleProblem assemble_first_order(const ProductGrid& grid, const Integrand& intg,
                                   std::vector<double> cost = {});

/// Curvature problem with f = rho + w/2 |Delta u|^2: phi_lambda1 <= rho,
/// (phi_xi, phi_lambda2) in the epigraph of |.|^2 / (2 w), mu in the simplex,
/// H positive semidefinite, and r enforcing phi_lambda = phi_lambda1 + phi_lambda2.
SaddleProblem assemble_laplacian(const ProductGrid& grid, const Integrand& intg,
                                 std::vector<double> cost = {});

/// Harmonic interpolation: f = w/2 |v|^2, no data term, mu pinned to
/// `boundary` on boundary pixels. Throws InfeasibleError unless every
/// boundary pixel of `boundary` is a probability density.
SaddleProblem assemble_harmonic(const ProductGrid& grid, const LiftedMeasure& boundary,
                                double weight = 1.0);

/// Second-order problem with block-symmetric H; NuclearNorm uses the
/// decoupled duals, SquaredL2Half the split form.
SaddleProblem assemble_second_order(const ProductGrid& grid, const Integrand& intg,
                                    std::vector<double> cost = {});

/// Linear operator on flat vectors, for norm estimation.
struct LinearOperator {
  std::size_t in_size = 0;
  std::size_t out_size = 0;
  std::function<void(std::span<const double>, std::span<double>)> apply;
  std::function<void(std::span<const double>, std::span<double>)> apply_adjoint;
};

/// Power iteration on K^T K; returns sqrt of the largest Rayleigh quotient
/// times 1.05. `history`, if given, receives the inflated estimate after each
/// iteration. Throws RangeError for iters < 10.
double estimate_opnorm(const LinearOperator& op, int iters, std::uint64_t seed,
                       std::vector<double>* history = nullptr);
double estimate_opnorm(const SaddleProblem& p, int iters, std::uint64_t seed,
                       std::vector<double>* history = nullptr);

struct SolverConfig {
  /// Step sizes; 0 selects tau = 1 / (b ||K||), sigma = b / ||K|| with
  /// b = step_balance.
  double tau = 0.0;
  double sigma = 0.0;
  double step_balance = 1.0;
  double theta = 1.0;
  int max_iters = 10000;
  int check_every = 100;
  double tol_feas = 1e-4;
  double tol_gap = 1e-6;
  std::uint64_t seed = 0;
  int opnorm_iters = 50;
};

struct Checkpoint {
  int iteration = 0;
  double energy = 0.0;
  double residual = 0.0;
  double violation = 0.0;
};

struct SolveReport {
  int iterations = 0;
  bool converged = false;
  /// Primal energy (data term plus lifted regularizer) scaled by the pixel
  /// volume. For quadratic regularizers the perspective uses
  /// max(mu, kEnergyMassFloor) so that stray momentum on empty labels stays
  /// finite.
  double energy = 0.0;
  /// Sup norm of the continuity residual of the primal iterate.
  double residual = 0.0;
  /// Named constraint violations of the final iterate.
  std::vector<std::pair<std::string, double>> violations;
  std::vector<Checkpoint> history;
  double opnorm = 0.0;
  double tau = 0.0;
  double sigma = 0.0;
  /// No energy increase above 1e-6 relative between checkpoints after
  /// iteration 100.
  bool energy_monotone = true;
  double wall_seconds = 0.0;

  /// Checkpoint history as CSV (iteration, energy, residual, violation).
  void write_csv(std::ostream& os) const;
};

inline constexpr double kEnergyMassFloor = 1e-9;

struct SolveResult {
  FieldSet primal;
  FieldSet dual;
  SolveReport report;
};

/// Primal energy of x (see SolveReport::energy).
double primal_energy(const SaddleProblem& p, const FieldSet& x);
/// Sup norm of the continuity residual of x.
double continuity_residual(const SaddleProblem& p, const FieldSet& x);
/// Named violations of the constraints not enforced by projection.
std::vector<std::pair<std::string, double>> constraint_violations(const SaddleProblem& p,
                                                                  const FieldSet& x);

/// PDHG: y <- P_D(y + sigma K xbar), x <- P_P(x - tau K^T y),
/// xbar <- x + theta (x - x_old). Starts from uniform mu, zero elsewhere, or
/// from `warm_start` (projected first). Stops at max_iters or at a checkpoint
/// where residual and violations are <= tol_feas and the relative energy change
/// since the previous checkpoint is <= tol_gap.
/// Throws DivergenceError on non-finite iterates, RangeError if the given
/// steps violate tau * sigma * ||K||^2 <= 1.
SolveResult solve(const SaddleProblem& p, const SolverConfig& config,
                  const FieldSet* warm_start = nullptr);

/// The primal mu as a probability density on the grid.
LiftedMeasure lifted_measure(const SaddleProblem& p, const FieldSet& x);

}  // namespace liftkit
