#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "liftkit/grid.hpp"
#include "liftkit/image.hpp"

namespace liftkit {

/// rho sampled on every grid point, in point order (labels fastest).
struct CostVolume {
  ProductGrid grid;
  std::vector<double> values;
  std::string source;

  CostVolume(ProductGrid g, std::vector<double> v, std::string src = {});

  double operator()(std::size_t pixel, std::size_t label) const {
    return values[grid.point(pixel, label)];
  }
  /// Throws DimensionError on a size mismatch, RangeError on negative or
  /// non-finite values.
  void validate() const;
};

/// Two equally shaped images with intensities in [0, 1].
struct ImagePair {
  Image first;
  Image second;

  /// Throws DimensionError on shape mismatch, RangeError for values outside [0, 1].
  void validate() const;
};

/// Truncated gradient-matching cost for scalar disparities:
///   rho(x, z) = mean over the window W(x) of
///     h(d1 I1(y1, y2 + z) - d1 I2(y)) + h(d2 I1(y1, y2 + z) - d2 I2(y)),
/// h(a) = min(|a|, nu), central-difference gradients, linear interpolation in
/// y2 + z, nearest extension outside the image, channels averaged. Domain axis
/// 0 is the image row, axis 1 the column; labels are column shifts in pixels.
CostVolume stereo_cost(const ImagePair& pair, const ProductGrid& grid, int window_radius,
                       double nu);

/// rho(x, z) = || I1(x + z) - I2(x) ||_2 across channels, bilinear
/// interpolation, nearest extension. With s = 1 the label shifts the last
/// domain axis; with s = 2 it is a (row, column) displacement.
CostVolume l1_cost(const ImagePair& pair, const ProductGrid& grid);

/// Binary format: magic "LKCOST01", u32 d, u32 s, u64 shape[d], f64 spacing[d],
/// u64 labels[s], f64 label coordinates per axis, u32 source length, source
/// bytes, f64 values in point order. Little-endian.
void save_cost_volume(const CostVolume& cv, const std::filesystem::path& path);
/// Throws FormatError for a bad magic or truncated file, DimensionError if
/// `expected` is given and its shape differs, RangeError on negative values.
CostVolume load_cost_volume(const std::filesystem::path& path,
                            const ProductGrid* expected = nullptr);

}  // namespace liftkit
