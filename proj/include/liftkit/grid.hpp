#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "liftkit/field.hpp"

namespace liftkit {

/// Regular discretization of a domain box (d axes) times a label box (s axes).
///
/// Grid points are ordered row-major over the axis list
/// (x_0, ..., x_{d-1}, z_0, ..., z_{s-1}), so the labels of one pixel form a
/// contiguous run: point = pixel * num_labels() + label.
class ProductGrid {
 public:
  ProductGrid() = default;

  /// Explicit label coordinates per range axis. Coordinates must be strictly
  /// increasing and equispaced; every axis needs at least two points.
  ProductGrid(std::vector<std::size_t> domain_shape, std::vector<double> domain_spacing,
              std::vector<std::vector<double>> range_values);

  /// Labels spaced uniformly in [lo[k], hi[k]] with counts[k] labels per axis.
  static ProductGrid uniform(std::vector<std::size_t> domain_shape,
                             std::vector<double> domain_spacing, std::vector<double> lo,
                             std::vector<double> hi, std::vector<std::size_t> counts);

  std::size_t domain_dims() const noexcept { return domain_shape_.size(); }
  std::size_t range_dims() const noexcept { return range_values_.size(); }

  const std::vector<std::size_t>& domain_shape() const noexcept { return domain_shape_; }
  const std::vector<double>& domain_spacing() const noexcept { return domain_spacing_; }
  const std::vector<std::size_t>& range_shape() const noexcept { return range_shape_; }
  const std::vector<double>& range_values(std::size_t k) const { return range_values_.at(k); }
  const std::vector<double>& range_spacing() const noexcept { return range_spacing_; }

  std::size_t num_pixels() const noexcept { return num_pixels_; }
  std::size_t num_labels() const noexcept { return num_labels_; }
  std::size_t num_points() const noexcept { return num_pixels_ * num_labels_; }

  /// Axis a in [0, d) is a domain axis, a in [d, d + s) the range axis a - d.
  std::size_t axis_count() const noexcept { return domain_dims() + range_dims(); }
  std::size_t axis_size(std::size_t a) const;
  std::size_t axis_stride(std::size_t a) const { return strides_.at(a); }
  double axis_spacing(std::size_t a) const;

  double pixel_volume() const noexcept { return pixel_volume_; }
  double label_volume() const noexcept { return label_volume_; }
  double cell_volume() const noexcept { return pixel_volume_ * label_volume_; }

  std::size_t point(std::size_t pixel, std::size_t label) const noexcept {
    return pixel * num_labels_ + label;
  }
  /// Coordinate of a flat label index along range axis k.
  double label_coord(std::size_t label, std::size_t k) const;
  /// Per-axis index of a flat label index along range axis k.
  std::size_t label_axis_index(std::size_t label, std::size_t k) const;
  std::size_t label_from_indices(std::span<const std::size_t> idx) const;

  std::size_t pixel_axis_index(std::size_t pixel, std::size_t i) const;
  std::size_t pixel_from_indices(std::span<const std::size_t> idx) const;
  /// Physical coordinate (index * spacing) of a pixel along domain axis i.
  double pixel_coord(std::size_t pixel, std::size_t i) const;
  bool pixel_on_boundary(std::size_t pixel) const;

  /// Range box per axis.
  double range_min(std::size_t k) const { return range_values_.at(k).front(); }
  double range_max(std::size_t k) const { return range_values_.at(k).back(); }

  Field scalar_field(double fill = 0.0) const { return Field(num_points(), 1, fill); }
  Field field(std::size_t components, double fill = 0.0) const {
    return Field(num_points(), components, fill);
  }
  Field pixel_field(std::size_t components, double fill = 0.0) const {
    return Field(num_pixels_, components, fill);
  }

  friend bool operator==(const ProductGrid&, const ProductGrid&) = default;

 private:
  std::vector<std::size_t> domain_shape_;
  std::vector<double> domain_spacing_;
  std::vector<std::size_t> range_shape_;
  std::vector<std::vector<double>> range_values_;
  std::vector<double> range_spacing_;
  std::vector<std::size_t> strides_;
  std::size_t num_pixels_ = 0;
  std::size_t num_labels_ = 0;
  double pixel_volume_ = 0.0;
  double label_volume_ = 0.0;
};

// Finite differences on scalar planes spanning the full grid.
//
// forward_diff: (u[i+1] - u[i]) / h along `axis`, zero on the last slice.
// backward_div: the negative adjoint of forward_diff, i.e.
//   v[0] / h, (v[i] - v[i-1]) / h, -v[n-2] / h.
// With accumulate = true the result is added to `out`.
void forward_diff(std::span<const double> in, std::span<double> out, const ProductGrid& grid,
                  std::size_t axis, bool accumulate = false);
void backward_div(std::span<const double> in, std::span<double> out, const ProductGrid& grid,
                  std::size_t axis, bool accumulate = false);

/// Gradient along the domain axes: scalar field -> d components.
Field grad_x(const Field& u, const ProductGrid& grid);
/// Divergence along the domain axes: d components -> scalar, equal to -grad_x^T.
Field div_x(const Field& v, const ProductGrid& grid);
/// Gradient along the range axes: scalar -> s components.
Field grad_z(const Field& u, const ProductGrid& grid);
/// Divergence along the range axes: s components -> scalar, equal to -grad_z^T.
Field div_z(const Field& v, const ProductGrid& grid);
/// div_x(grad_x(u)); symmetric negative semidefinite.
Field laplace_x(const Field& u, const ProductGrid& grid);

/// Second differences in the range variables: scalar -> s*s symmetric matrix
/// per point (row-major). Diagonal k: div_k(grad_k u). Off-diagonal (k, l):
/// (div_l grad_k u + div_k grad_l u) / 2.
Field hess_z(const Field& u, const ProductGrid& grid);
/// Entry (k, l) of hess_z on one scalar plane; each entry operator is
/// self-adjoint. `tmp` is scratch of one plane.
void hess_z_entry(std::span<const double> in, std::span<double> out, std::span<double> tmp,
                  const ProductGrid& grid, std::size_t k, std::size_t l, bool accumulate = false);
/// Adjoint of hess_z: s*s components -> scalar.
Field hess_z_adjoint(const Field& h, const ProductGrid& grid);

void check_shape(const Field& f, const ProductGrid& grid, std::size_t components,
                 const char* what);

}  // namespace liftkit
