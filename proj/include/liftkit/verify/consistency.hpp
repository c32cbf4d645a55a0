#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "liftkit/continuity.hpp"

namespace liftkit::verify {

/// Residual norms of the three graph triples on one refinement level, indexed
/// FirstOrder, SecondOrder, Laplacian.
struct ConsistencyLevel {
  std::size_t pixels_per_axis = 0;
  std::size_t labels = 0;
  std::array<double, 3> sup{};
  std::array<double, 3> weak{};
};

/// Smooth scalar graph u(x, y) = 0.5 sin(pi x) cos(pi y / 2) on [0, 1]^2 with
/// range [-1, 1], lifted with n pixels and n labels per axis for each n in
/// `sizes`. The weak norm uses a bank of `bank_size` test functions.
std::vector<ConsistencyLevel> consistency_study(const std::vector<std::size_t>& sizes,
                                                std::size_t bank_size = 6);

/// Smallest ratio coarse/fine over consecutive levels for operator `kind`.
double min_ratio(const std::vector<ConsistencyLevel>& levels, ContinuityKind kind, bool weak);

}  // namespace liftkit::verify
