#include "liftkit/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "liftkit/error.hpp"
#include "liftkit/simd/kernels.hpp"

namespace liftkit {

ProductGrid::ProductGrid(std::vector<std::size_t> domain_shape, std::vector<double> domain_spacing,
                         std::vector<std::vector<double>> range_values)
    : domain_shape_(std::move(domain_shape)),
      domain_spacing_(std::move(domain_spacing)),
      range_values_(std::move(range_values)) {
  if (domain_shape_.empty()) throw DimensionError("grid: domain needs at least one axis");
  if (range_values_.empty()) throw DimensionError("grid: range needs at least one axis");
  if (domain_spacing_.size() != domain_shape_.size()) {
    throw DimensionError("grid: domain spacing count does not match domain axes");
  }
  num_pixels_ = 1;
  pixel_volume_ = 1.0;
  for (std::size_t i = 0; i < domain_shape_.size(); ++i) {
    if (domain_shape_[i] < 2) throw DimensionError("grid: domain axis needs at least 2 points");
    if (!(domain_spacing_[i] > 0.0)) throw DimensionError("grid: domain spacing must be > 0");
    num_pixels_ *= domain_shape_[i];
    pixel_volume_ *= domain_spacing_[i];
  }
  num_labels_ = 1;
  label_volume_ = 1.0;
  for (std::size_t k = 0; k < range_values_.size(); ++k) {
    const auto& z = range_values_[k];
    if (z.size() < 2) throw DimensionError("grid: range axis needs at least 2 labels");
    const double h = (z.back() - z.front()) / static_cast<double>(z.size() - 1);
    if (!(h > 0.0)) throw DimensionError("grid: label coordinates must be increasing");
    for (std::size_t j = 1; j < z.size(); ++j) {
      if (!(z[j] > z[j - 1])) throw DimensionError("grid: label coordinates must be strictly increasing");
      const double expected = z.front() + h * static_cast<double>(j);
      if (std::fabs(z[j] - expected) > 1e-9 * (std::fabs(h) + std::fabs(expected))) {
        throw DimensionError("grid: label coordinates must be equispaced");
      }
    }
    range_shape_.push_back(z.size());
    range_spacing_.push_back(h);
    num_labels_ *= z.size();
    label_volume_ *= h;
  }
  const std::size_t axes = domain_shape_.size() + range_shape_.size();
  strides_.assign(axes, 1);
  for (std::size_t a = axes; a-- > 1;) strides_[a - 1] = strides_[a] * axis_size(a);
}

ProductGrid ProductGrid::uniform(std::vector<std::size_t> domain_shape,
                                 std::vector<double> domain_spacing, std::vector<double> lo,
                                 std::vector<double> hi, std::vector<std::size_t> counts) {
  if (lo.size() != hi.size() || lo.size() != counts.size()) {
    throw DimensionError("grid: range bounds and label counts disagree in length");
  }
  std::vector<std::vector<double>> values(lo.size());
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (counts[k] < 2) throw DimensionError("grid: range axis needs at least 2 labels");
    if (!(hi[k] > lo[k])) throw DimensionError("grid: range bounds must be ordered");
    const double h = (hi[k] - lo[k]) / static_cast<double>(counts[k] - 1);
    values[k].resize(counts[k]);
    for (std::size_t j = 0; j < counts[k]; ++j) values[k][j] = lo[k] + h * static_cast<double>(j);
    values[k].back() = hi[k];
  }
  return ProductGrid(std::move(domain_shape), std::move(domain_spacing), std::move(values));
}

std::size_t ProductGrid::axis_size(std::size_t a) const {
  const std::size_t d = domain_dims();
  return a < d ? domain_shape_.at(a) : range_shape_.at(a - d);
}

double ProductGrid::axis_spacing(std::size_t a) const {
  const std::size_t d = domain_dims();
  return a < d ? domain_spacing_.at(a) : range_spacing_.at(a - d);
}

double ProductGrid::label_coord(std::size_t label, std::size_t k) const {
  return range_values_[k][label_axis_index(label, k)];
}

std::size_t ProductGrid::label_axis_index(std::size_t label, std::size_t k) const {
  return (label / strides_[domain_dims() + k]) % range_shape_[k];
}

std::size_t ProductGrid::label_from_indices(std::span<const std::size_t> idx) const {
  if (idx.size() != range_dims()) throw DimensionError("grid: label index arity");
  std::size_t label = 0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] >= range_shape_[k]) throw RangeError("grid: label index out of range");
    label += idx[k] * strides_[domain_dims() + k];
  }
  return label;
}

std::size_t ProductGrid::pixel_axis_index(std::size_t pixel, std::size_t i) const {
  return (pixel * num_labels_ / strides_[i]) % domain_shape_[i];
}

std::size_t ProductGrid::pixel_from_indices(std::span<const std::size_t> idx) const {
  if (idx.size() != domain_dims()) throw DimensionError("grid: pixel index arity");
  std::size_t pixel = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= domain_shape_[i]) throw RangeError("grid: pixel index out of range");
    pixel += idx[i] * (strides_[i] / num_labels_);
  }
  return pixel;
}

double ProductGrid::pixel_coord(std::size_t pixel, std::size_t i) const {
  return static_cast<double>(pixel_axis_index(pixel, i)) * domain_spacing_[i];
}

bool ProductGrid::pixel_on_boundary(std::size_t pixel) const {
  for (std::size_t i = 0; i < domain_dims(); ++i) {
    const std::size_t j = pixel_axis_index(pixel, i);
    if (j == 0 || j + 1 == domain_shape_[i]) return true;
  }
  return false;
}

void check_shape(const Field& f, const ProductGrid& grid, std::size_t components,
                 const char* what) {
  if (f.points() != grid.num_points() || f.components() != components) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(components) +
                         " component(s) over " + std::to_string(grid.num_points()) +
                         " points, got " + std::to_string(f.components()) + " over " +
                         std::to_string(f.points()));
  }
}

namespace {

void check_plane(std::span<const double> in, std::span<double> out, const ProductGrid& grid,
                 std::size_t axis) {
  if (in.size() != grid.num_points() || out.size() != grid.num_points()) {
    throw DimensionError("finite difference: plane size does not match grid");
  }
  if (axis >= grid.axis_count()) throw DimensionError("finite difference: axis out of range");
}

}  // namespace

void forward_diff(std::span<const double> in, std::span<double> out, const ProductGrid& grid,
                  std::size_t axis, bool accumulate) {
  check_plane(in, out, grid, axis);
  const auto& k = simd::active();
  const std::size_t n = grid.axis_size(axis);
  const std::size_t stride = grid.axis_stride(axis);
  const std::size_t block = n * stride;
  const double inv_h = 1.0 / grid.axis_spacing(axis);
  const std::size_t body = (n - 1) * stride;
  if (stride == 1 && n < 16) {
    // Short innermost lines: one pass beats a kernel call per line.
    for (std::size_t base = 0; base < in.size(); base += n) {
      const double* u = in.data() + base;
      double* o = out.data() + base;
      for (std::size_t j = 0; j + 1 < n; ++j) {
        const double v = (u[j + 1] - u[j]) * inv_h;
        o[j] = accumulate ? o[j] + v : v;
      }
      if (!accumulate) o[n - 1] = 0.0;
    }
    return;
  }
  // Within one block of the axis the forward difference is a single contiguous
  // run: out[j] = (in[j + stride] - in[j]) / h for j < (n - 1) * stride.
  for (std::size_t base = 0; base < in.size(); base += block) {
    double* o = out.data() + base;
    const double* u = in.data() + base;
    if (accumulate) {
      k.scaled_diff_acc(o, u + stride, u, inv_h, body);
    } else {
      k.scaled_diff(o, u + stride, u, inv_h, body);
      std::fill(o + body, o + block, 0.0);
    }
  }
}

void backward_div(std::span<const double> in, std::span<double> out, const ProductGrid& grid,
                  std::size_t axis, bool accumulate) {
  check_plane(in, out, grid, axis);
  const auto& k = simd::active();
  const std::size_t n = grid.axis_size(axis);
  const std::size_t stride = grid.axis_stride(axis);
  const std::size_t block = n * stride;
  const double inv_h = 1.0 / grid.axis_spacing(axis);
  const std::size_t last = (n - 1) * stride;
  if (stride == 1 && n < 16 && n > 1) {
    for (std::size_t base = 0; base < in.size(); base += n) {
      const double* v = in.data() + base;
      double* o = out.data() + base;
      for (std::size_t j = 0; j < n; ++j) {
        const double d = j == 0       ? v[0] * inv_h
                         : j + 1 == n ? v[n - 2] * -inv_h
                                      : (v[j] - v[j - 1]) * inv_h;
        o[j] = accumulate ? o[j] + d : d;
      }
    }
    return;
  }
  for (std::size_t base = 0; base < in.size(); base += block) {
    double* o = out.data() + base;
    const double* v = in.data() + base;
    if (accumulate) {
      k.scale_acc(o, v, inv_h, stride);
      k.scaled_diff_acc(o + stride, v + stride, v, inv_h, last - stride);
      k.scale_acc(o + last, v + last - stride, -inv_h, stride);
    } else {
      k.scale(o, v, inv_h, stride);
      k.scaled_diff(o + stride, v + stride, v, inv_h, last - stride);
      k.scale(o + last, v + last - stride, -inv_h, stride);
    }
  }
}

Field grad_x(const Field& u, const ProductGrid& grid) {
  check_shape(u, grid, 1, "grad_x");
  const std::size_t d = grid.domain_dims();
  Field out = grid.field(d);
  for (std::size_t i = 0; i < d; ++i) forward_diff(u.component(0), out.component(i), grid, i);
  return out;
}

Field div_x(const Field& v, const ProductGrid& grid) {
  const std::size_t d = grid.domain_dims();
  check_shape(v, grid, d, "div_x");
  Field out = grid.scalar_field();
  for (std::size_t i = 0; i < d; ++i) backward_div(v.component(i), out.component(0), grid, i, i > 0);
  return out;
}

Field grad_z(const Field& u, const ProductGrid& grid) {
  check_shape(u, grid, 1, "grad_z");
  const std::size_t d = grid.domain_dims();
  const std::size_t s = grid.range_dims();
  Field out = grid.field(s);
  for (std::size_t k = 0; k < s; ++k) forward_diff(u.component(0), out.component(k), grid, d + k);
  return out;
}

Field div_z(const Field& v, const ProductGrid& grid) {
  const std::size_t d = grid.domain_dims();
  const std::size_t s = grid.range_dims();
  check_shape(v, grid, s, "div_z");
  Field out = grid.scalar_field();
  for (std::size_t k = 0; k < s; ++k) {
    backward_div(v.component(k), out.component(0), grid, d + k, k > 0);
  }
  return out;
}

Field laplace_x(const Field& u, const ProductGrid& grid) { return div_x(grad_x(u, grid), grid); }

namespace {

// out (+)= div_b(grad_a(in)) * weight, using `tmp` as scratch.
void second_diff(std::span<const double> in, std::span<double> out, std::span<double> tmp,
                 const ProductGrid& grid, std::size_t a, std::size_t b, double weight,
                 bool accumulate) {
  forward_diff(in, tmp, grid, a);
  if (weight != 1.0) simd::active().scale(tmp.data(), tmp.data(), weight, tmp.size());
  backward_div(tmp, out, grid, b, accumulate);
}

}  // namespace

void hess_z_entry(std::span<const double> in, std::span<double> out, std::span<double> tmp,
                  const ProductGrid& grid, std::size_t k, std::size_t l, bool accumulate) {
  const std::size_t d = grid.domain_dims();
  if (k >= grid.range_dims() || l >= grid.range_dims()) {
    throw DimensionError("hess_z_entry: range axis out of bounds");
  }
  if (tmp.size() != grid.num_points()) throw DimensionError("hess_z_entry: scratch size");
  if (k == l) {
    second_diff(in, out, tmp, grid, d + k, d + k, 1.0, accumulate);
  } else {
    second_diff(in, out, tmp, grid, d + k, d + l, 0.5, accumulate);
    second_diff(in, out, tmp, grid, d + l, d + k, 0.5, true);
  }
}

Field hess_z(const Field& u, const ProductGrid& grid) {
  check_shape(u, grid, 1, "hess_z");
  const std::size_t s = grid.range_dims();
  Field out = grid.field(s * s);
  std::vector<double> tmp(grid.num_points());
  for (std::size_t k = 0; k < s; ++k) {
    hess_z_entry(u.component(0), out.component(k * s + k), tmp, grid, k, k);
    for (std::size_t l = k + 1; l < s; ++l) {
      auto kl = out.component(k * s + l);
      hess_z_entry(u.component(0), kl, tmp, grid, k, l);
      auto lk = out.component(l * s + k);
      std::copy(kl.begin(), kl.end(), lk.begin());
    }
  }
  return out;
}

Field hess_z_adjoint(const Field& h, const ProductGrid& grid) {
  const std::size_t s = grid.range_dims();
  check_shape(h, grid, s * s, "hess_z_adjoint");
  Field out = grid.scalar_field();
  std::vector<double> tmp(grid.num_points());
  // Each entry operator of hess_z is self-adjoint, so the adjoint applies the
  // same stencil to every entry of h and sums.
  for (std::size_t k = 0; k < s; ++k) {
    for (std::size_t l = 0; l < s; ++l) {
      hess_z_entry(h.component(k * s + l), out.component(0), tmp, grid, k, l, k + l > 0);
    }
  }
  return out;
}

}  // namespace liftkit
