#pragma once

#include <cstddef>
#include <vector>

namespace liftkit {

/// Row-major image with interleaved channels, intensities in [0, 1].
struct Image {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 1;
  std::vector<double> data;

  Image() = default;
  Image(std::size_t h, std::size_t w, std::size_t c = 1, double fill = 0.0)
      : height(h), width(w), channels(c), data(h * w * c, fill) {}

  double& at(std::size_t row, std::size_t col, std::size_t c = 0) {
    return data[(row * width + col) * channels + c];
  }
  double at(std::size_t row, std::size_t col, std::size_t c = 0) const {
    return data[(row * width + col) * channels + c];
  }
  /// Nearest-pixel extension outside the image.
  double clamped(long row, long col, std::size_t c = 0) const;
  /// Bilinear interpolation at a fractional position, nearest extension outside.
  double bilinear(double row, double col, std::size_t c = 0) const;

  bool same_shape(const Image& o) const {
    return height == o.height && width == o.width && channels == o.channels;
  }
};

}  // namespace liftkit
