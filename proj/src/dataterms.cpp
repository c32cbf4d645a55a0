#include "liftkit/dataterms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "liftkit/error.hpp"

namespace liftkit {

CostVolume::CostVolume(ProductGrid g, std::vector<double> v, std::string src)
    : grid(std::move(g)), values(std::move(v)), source(std::move(src)) {
  validate();
}

void CostVolume::validate() const {
  if (values.size() != grid.num_points()) {
    throw DimensionError("CostVolume: " + std::to_string(values.size()) + " values for " +
                         std::to_string(grid.num_points()) + " grid points");
  }
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) throw RangeError("CostVolume: values must be finite and >= 0");
  }
}

void ImagePair::validate() const {
  if (!first.same_shape(second)) throw DimensionError("ImagePair: images differ in shape");
  if (first.data.size() != first.height * first.width * first.channels) {
    throw DimensionError("ImagePair: image storage does not match its shape");
  }
  for (const Image* im : {&first, &second}) {
    for (double v : im->data) {
      if (!(v >= 0.0 && v <= 1.0)) throw RangeError("ImagePair: intensities must lie in [0, 1]");
    }
  }
}

namespace {

// Image rows/columns covered by the domain: a 1D domain is a single row.
void check_image_grid(const ImagePair& pair, const ProductGrid& grid, const char* what) {
  pair.validate();
  const auto& shape = grid.domain_shape();
  if (shape.size() > 2) throw DimensionError(std::string(what) + ": domain must be 1D or 2D");
  const std::size_t rows = shape.size() == 2 ? shape[0] : 1;
  if (pair.first.height != rows || pair.first.width != shape.back()) {
    throw DimensionError(std::string(what) + ": image shape does not match the grid");
  }
}

std::size_t pixel_row(const ProductGrid& grid, std::size_t pixel) {
  return grid.domain_dims() == 2 ? grid.pixel_axis_index(pixel, 0) : 0;
}

std::size_t pixel_col(const ProductGrid& grid, std::size_t pixel) {
  return grid.pixel_axis_index(pixel, grid.domain_dims() - 1);
}

// Central differences with nearest extension; axis 0 = rows, 1 = columns.
Image gradient(const Image& im, int axis) {
  Image g(im.height, im.width, im.channels);
  for (std::size_t r = 0; r < im.height; ++r) {
    for (std::size_t c = 0; c < im.width; ++c) {
      const long lr = static_cast<long>(r);
      const long lc = static_cast<long>(c);
      for (std::size_t ch = 0; ch < im.channels; ++ch) {
        g.at(r, c, ch) = axis == 0
                             ? 0.5 * (im.clamped(lr + 1, lc, ch) - im.clamped(lr - 1, lc, ch))
                             : 0.5 * (im.clamped(lr, lc + 1, ch) - im.clamped(lr, lc - 1, ch));
      }
    }
  }
  return g;
}

}  // namespace

CostVolume stereo_cost(const ImagePair& pair, const ProductGrid& grid, int window_radius,
                       double nu) {
  if (grid.range_dims() != 1) throw DimensionError("stereo_cost: disparity must be scalar");
  if (!(nu > 0.0)) throw RangeError("stereo_cost: nu must be positive");
  if (window_radius < 0) throw RangeError("stereo_cost: window radius must be >= 0");
  check_image_grid(pair, grid, "stereo_cost");
  const double width = static_cast<double>(pair.first.width);
  if (std::fabs(grid.range_min(0)) >= width || std::fabs(grid.range_max(0)) >= width) {
    throw RangeError("stereo_cost: disparity range exceeds the image width");
  }
  const Image g1r = gradient(pair.first, 0), g1c = gradient(pair.first, 1);
  const Image g2r = gradient(pair.second, 0), g2c = gradient(pair.second, 1);
  const std::size_t ch = pair.first.channels;
  const long R = window_radius;
  const double norm = 1.0 / static_cast<double>((2 * R + 1) * (2 * R + 1) * static_cast<long>(ch));
  auto h = [nu](double a) { return std::min(std::fabs(a), nu); };

  std::vector<double> values(grid.num_points());
  for (std::size_t x = 0; x < grid.num_pixels(); ++x) {
    const long r = static_cast<long>(pixel_row(grid, x));
    const long c = static_cast<long>(pixel_col(grid, x));
    for (std::size_t l = 0; l < grid.num_labels(); ++l) {
      const double z = grid.label_coord(l, 0);
      double sum = 0.0;
      for (long a = -R; a <= R; ++a) {
        for (long b = -R; b <= R; ++b) {
          // Window samples outside the image use the nearest pixel.
          const long yr = std::clamp(r + a, 0L, static_cast<long>(pair.first.height) - 1);
          const long yc = std::clamp(c + b, 0L, static_cast<long>(pair.first.width) - 1);
          const double row = static_cast<double>(yr);
          const double col = static_cast<double>(yc) + z;
          for (std::size_t k = 0; k < ch; ++k) {
            sum += h(g1r.bilinear(row, col, k) - g2r.clamped(yr, yc, k)) +
                   h(g1c.bilinear(row, col, k) - g2c.clamped(yr, yc, k));
          }
        }
      }
      values[grid.point(x, l)] = sum * norm;
    }
  }
  return CostVolume(grid, std::move(values), "stereo_cost");
}

CostVolume l1_cost(const ImagePair& pair, const ProductGrid& grid) {
  const std::size_t s = grid.range_dims();
  if (s != 1 && s != 2) throw DimensionError("l1_cost: labels must have 1 or 2 components");
  if (s == 2 && grid.domain_dims() != 2) {
    throw DimensionError("l1_cost: 2D displacements need a 2D domain");
  }
  check_image_grid(pair, grid, "l1_cost");
  const std::size_t ch = pair.first.channels;
  std::vector<double> values(grid.num_points());
  for (std::size_t x = 0; x < grid.num_pixels(); ++x) {
    const std::size_t r = pixel_row(grid, x);
    const std::size_t c = pixel_col(grid, x);
    for (std::size_t l = 0; l < grid.num_labels(); ++l) {
      const double dr = s == 2 ? grid.label_coord(l, 0) : 0.0;
      const double dc = grid.label_coord(l, s - 1);
      double sq = 0.0;
      for (std::size_t k = 0; k < ch; ++k) {
        const double diff = pair.first.bilinear(static_cast<double>(r) + dr,
                                                static_cast<double>(c) + dc, k) -
                            pair.second.at(r, c, k);
        sq += diff * diff;
      }
      values[grid.point(x, l)] = std::sqrt(sq);
    }
  }
  return CostVolume(grid, std::move(values), "l1_cost");
}

// ---------------------------------------------------------------- binary format

namespace {

constexpr char kMagic[8] = {'L', 'K', 'C', 'O', 'S', 'T', '0', '1'};

static_assert(std::endian::native == std::endian::little,
              "cost-volume I/O assumes a little-endian host");

template <typename T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is, const std::filesystem::path& path) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw FormatError("cost volume " + path.string() + ": truncated file");
  }
  return v;
}

}  // namespace

void save_cost_volume(const CostVolume& cv, const std::filesystem::path& path) {
  cv.validate();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  const auto& g = cv.grid;
  os.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.domain_dims()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.range_dims()));
  for (auto n : g.domain_shape()) put<std::uint64_t>(os, n);
  for (double h : g.domain_spacing()) put<double>(os, h);
  for (auto n : g.range_shape()) put<std::uint64_t>(os, n);
  for (std::size_t k = 0; k < g.range_dims(); ++k) {
    for (double z : g.range_values(k)) put<double>(os, z);
  }
  put<std::uint32_t>(os, static_cast<std::uint32_t>(cv.source.size()));
  os.write(cv.source.data(), static_cast<std::streamsize>(cv.source.size()));
  os.write(reinterpret_cast<const char*>(cv.values.data()),
           static_cast<std::streamsize>(cv.values.size() * sizeof(double)));
  if (!os) throw FormatError("write failed for " + path.string());
}

CostVolume load_cost_volume(const std::filesystem::path& path, const ProductGrid* expected) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  char magic[8];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw FormatError("cost volume " + path.string() + ": bad magic");
  }
  const auto d = get<std::uint32_t>(is, path);
  const auto s = get<std::uint32_t>(is, path);
  if (d == 0 || s == 0 || d > 8 || s > 8) throw FormatError("cost volume: implausible dimensions");
  std::vector<std::size_t> shape(d);
  std::vector<double> spacing(d);
  std::vector<std::vector<double>> labels(s);
  for (auto& n : shape) n = get<std::uint64_t>(is, path);
  for (auto& h : spacing) h = get<double>(is, path);
  std::vector<std::size_t> counts(s);
  for (auto& n : counts) {
    n = get<std::uint64_t>(is, path);
    if (n > (1u << 20)) throw FormatError("cost volume: implausible label count");
  }
  for (std::size_t k = 0; k < s; ++k) {
    labels[k].resize(counts[k]);
    for (double& z : labels[k]) z = get<double>(is, path);
  }
  const auto len = get<std::uint32_t>(is, path);
  if (len > (1u << 16)) throw FormatError("cost volume: implausible source length");
  std::string source(len, '\0');
  if (!is.read(source.data(), len)) throw FormatError("cost volume: truncated file");
  ProductGrid grid(shape, spacing, labels);
  if (expected && !(*expected == grid)) {
    throw DimensionError("cost volume " + path.string() + ": grid does not match");
  }
  std::vector<double> values(grid.num_points());
  if (!is.read(reinterpret_cast<char*>(values.data()),
               static_cast<std::streamsize>(values.size() * sizeof(double)))) {
    throw FormatError("cost volume " + path.string() + ": truncated payload");
  }
  return CostVolume(std::move(grid), std::move(values), std::move(source));
}

}  // namespace liftkit
