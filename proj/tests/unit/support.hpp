#pragma once

#include <cstdint>
#include <random>

#include "liftkit/field.hpp"
#include "liftkit/grid.hpp"

namespace liftkit::testing {

inline Field random_field(std::size_t points, std::size_t components, std::uint64_t seed,
                          double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Field f(points, components);
  for (double& v : f.values()) v = dist(rng);
  return f;
}

inline Field random_field(const ProductGrid& grid, std::size_t components, std::uint64_t seed) {
  return random_field(grid.num_points(), components, seed);
}

/// |<a, b>| scale used for relative adjointness checks.
inline double product_scale(const Field& a, const Field& b) { return norm2(a) * norm2(b); }

}  // namespace liftkit::testing
