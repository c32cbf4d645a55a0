#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "liftkit/field.hpp"
#include "liftkit/grid.hpp"
#include "liftkit/integrand.hpp"

namespace liftkit {

/// Mass threshold separating the absolutely continuous part of E from its
/// singular part in bb_eval.
inline constexpr double kMassEpsilon = 1e-12;

/// Density of a probability measure per pixel: values >= 0 and
/// sum_z values(x, z) * label_volume = 1 for every pixel x.
struct LiftedMeasure {
  ProductGrid grid;
  Field values;

  explicit LiftedMeasure(ProductGrid g) : grid(std::move(g)), values(grid.scalar_field()) {}
  LiftedMeasure(ProductGrid g, Field v);

  /// Uniform density over the labels (the simplex barycenter).
  static LiftedMeasure uniform(const ProductGrid& grid);

  /// Mass sum_z values(x, z) * label_volume of one pixel.
  double pixel_mass(std::size_t pixel) const;
  /// Throws RangeError unless values >= -tol and every pixel mass is 1 within tol.
  void validate(double tol = 1e-8) const;
};

/// Per-point tensor field with shape `tensor_dims` (row-major in the
/// component index).
struct MomentumField {
  ProductGrid grid;
  std::vector<std::size_t> tensor_dims;
  Field values;

  MomentumField(ProductGrid g, std::vector<std::size_t> dims);
  MomentumField(ProductGrid g, std::vector<std::size_t> dims, Field v);

  std::size_t tensor_size() const noexcept { return values.components(); }
  /// Copies the tensor at one grid point.
  std::vector<double> at(std::size_t point) const;
};

/// H for the Laplacian model (s x s per point) or the full second-order
/// model (d x s x d x s per point, index ((i * s + k) * d + j) * s + l).
struct HessianField {
  enum class Layout { Laplacian, Full };

  ProductGrid grid;
  Layout layout;
  Field values;

  HessianField(ProductGrid g, Layout layout);
  HessianField(ProductGrid g, Layout layout, Field v);

  /// Laplacian layout: symmetric with eigenvalues >= -tol at every point.
  bool symmetric_psd(double tol = 1e-10) const;
  /// Full layout: [A]_{i,k,j,l} = [A]_{i,l,j,k} at every point.
  bool block_symmetric(double tol = 1e-12) const;
};

/// u : Omega_h -> Gamma, s components per pixel.
struct GraphFunction {
  std::vector<std::size_t> domain_shape;
  Field values;  // pixels x s

  GraphFunction(std::vector<std::size_t> shape, std::size_t range_dims, double fill = 0.0);

  std::size_t range_dims() const noexcept { return values.components(); }
  /// Throws DimensionError/RangeError unless u fits the grid and its range box.
  void validate(const ProductGrid& grid) const;
};

/// Per-axis nearest label of u(x), as a flat label index.
std::size_t nearest_label(const GraphFunction& u, std::size_t pixel, const ProductGrid& grid);

/// delta_u with nearest-label rounding: density 1 / label_volume on the label
/// nearest to u(x).
LiftedMeasure lift_graph(const GraphFunction& u, const ProductGrid& grid);

/// E = p delta_u: p(x) / label_volume on the label nearest to u(x).
/// `p` has one tensor of shape `tensor_dims` per pixel.
MomentumField lift_momentum(const GraphFunction& u, const Field& p,
                            std::vector<std::size_t> tensor_dims, const ProductGrid& grid);

/// Per-pixel expectation of the label coordinates, clamped to the range box.
/// Throws DegenerateMeasureError when a pixel carries mass below 1e-12.
GraphFunction unlift(const LiftedMeasure& mu);

/// Discrete Benamou-Brenier functional sum_t w * perspective(t, E(t), mu(t)),
/// with the recession function on the singular part (mu <= eps, E != 0) and
/// +inf for any mu < -eps. w is the grid cell volume.
ExtReal bb_eval(const Integrand& intg, const MomentumField& E, const LiftedMeasure& mu);
/// Same, on raw fields over `grid`.
ExtReal bb_eval(const Integrand& intg, const Field& E, const Field& mu, const ProductGrid& grid);

/// Lower bound on bb_eval from its dual definition: maximizes
/// sum_t w * (<E(t), xi(t)> - mu(t) f*(t, xi(t))) by projected gradient ascent
/// from `n_samples` random starts per point. Grids are limited to 200 points.
double bb_dual_oracle(const Integrand& intg, const MomentumField& E, const LiftedMeasure& mu,
                      std::size_t n_samples, std::uint64_t seed);

/// Scalar subgraph check. Builds the discrete distributional derivative of the
/// subgraph indicator of the rounded u: mu = -D_z 1_u and E = D_x 1_u, where E
/// spreads over the labels crossed between neighbouring pixels. Returns
/// (bb_eval of that pair, direct energy sum_x w_x f(x, u(x), grad_x^h u(x))).
std::pair<ExtReal, double> subgraph_check(const GraphFunction& u, const Integrand& intg,
                                          const ProductGrid& grid);

/// Direct energy sum_x w_x (rho(x, label(u(x))) + eta(grad_x^h u(x))) with
/// forward differences and Neumann closure; the gradient tensor is d x s.
double direct_energy(const GraphFunction& u, const Integrand& intg, const ProductGrid& grid);

/// grad_x^h u per pixel as a d x s tensor field over pixels.
Field pixel_gradient(const GraphFunction& u, const ProductGrid& grid);

}  // namespace liftkit
