#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace liftkit::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  /// Human-readable measured values.
  std::string measured;
  double seconds = 0.0;
  /// Diagnostics with gating = false never fail a run.
  bool gating = true;
};

struct BatteryOptions {
  std::uint64_t seed = 0;
  /// Negative control: perturbs every adjoint by a relative 1e-6.
  bool break_adjoint = false;
};

/// 20 random instances (grid <= 4x4, <= 4 labels, SquaredL2Half, rho >= 0):
/// bb_dual_oracle in [bb_eval (1 - 1e-3) - 1e-6, bb_eval + 1e-9].
CheckResult check_oracle_sandwich(const BatteryOptions& opt);

/// 20 random label-valued u on 16x16 grids with 8 labels: bb_eval of the
/// lifted graph pair equals the direct energy to 1e-12 relative, for every
/// regularizer kind.
CheckResult check_graph_lifting(const BatteryOptions& opt);

/// Sup-norm residual of the three graph triples of a smooth u drops by >= 1.8
/// per halving of h over two refinements.
CheckResult check_continuity_sup(const BatteryOptions& opt);

/// The same study in the weak norm (test functions), threshold 1.8.
CheckResult check_continuity_weak(const BatteryOptions& opt);

/// grad/div pairs, hess_z, laplace_x and the three continuity adjoint pairs on
/// 50 random field pairs each, 1e-12 relative, plus the assembled saddle
/// couplings (1e-10).
CheckResult check_adjointness(const BatteryOptions& opt);

/// The five nontrivial projections against brute-force oracles on 100 random
/// instances each (dim <= 6), tolerance 1e-6.
CheckResult check_projection_oracles(const BatteryOptions& opt);

/// Subgraph construction: exact for constant u, relative gap below 5e-2 for a
/// smooth off-label u at 64 labels.
CheckResult check_subgraph(const BatteryOptions& opt);

/// The property battery run by the verify command; the sup-norm continuity
/// study is included as a non-gating diagnostic.
std::vector<CheckResult> run_property_battery(const BatteryOptions& opt);

}  // namespace liftkit::verify
