#include "liftkit/cli/io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "liftkit/error.hpp"

namespace liftkit::io {

namespace fs = std::filesystem;

namespace {

static_assert(std::endian::native == std::endian::little, "binary dumps assume little-endian");

struct Raster {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 0;
  int depth = 8;
  std::vector<unsigned char> bytes;
};

void png_fail(png_structp png, png_const_charp) { png_longjmp(png, 1); }
void png_quiet(png_structp, png_const_charp) {}

// libpng reports errors by longjmp; keep this frame free of objects with
// destructors and reach every output through pointers.
bool png_decode(std::FILE* fp, Raster* out) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_quiet);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  png_bytep* volatile rows = nullptr;
  if (setjmp(png_jmpbuf(png))) {
    std::free(rows);
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, fp);
  png_read_info(png, info);
  png_set_expand(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);
  out->width = png_get_image_width(png, info);
  out->height = png_get_image_height(png, info);
  out->channels = png_get_channels(png, info);
  out->depth = png_get_bit_depth(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  out->bytes.resize(stride * out->height);
  rows = static_cast<png_bytep*>(std::malloc(sizeof(png_bytep) * out->height));
  if (!rows) png_error(png, "out of memory");
  for (std::size_t r = 0; r < out->height; ++r) rows[r] = out->bytes.data() + r * stride;
  png_read_image(png, rows);
  png_read_end(png, nullptr);
  std::free(rows);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

bool png_encode(std::FILE* fp, const Raster* in) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_quiet);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, fp);
  const int color = in->channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY;
  png_set_IHDR(png, info, static_cast<png_uint_32>(in->width),
               static_cast<png_uint_32>(in->height), in->depth, color, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = in->width * in->channels * static_cast<std::size_t>(in->depth / 8);
  for (std::size_t r = 0; r < in->height; ++r) {
    png_write_row(png, const_cast<png_bytep>(in->bytes.data() + r * stride));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

// Samples are big-endian for 16-bit data in both PNG and PGM.
Image to_image(const Raster& r, double maxval) {
  Image im(r.height, r.width, r.channels);
  const std::size_t n = r.width * r.height * r.channels;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = r.depth == 16 ? static_cast<double>((r.bytes[2 * i] << 8) | r.bytes[2 * i + 1])
                                   : static_cast<double>(r.bytes[i]);
    im.data[i] = std::min(v / maxval, 1.0);
  }
  return im;
}

Raster from_image(const Image& im, int depth) {
  if (depth != 8 && depth != 16) throw RangeError("image output: bit depth must be 8 or 16");
  if (im.channels != 1 && im.channels != 3) throw DimensionError("image output: 1 or 3 channels");
  if (im.data.size() != im.width * im.height * im.channels || im.width == 0 || im.height == 0) {
    throw DimensionError("image output: storage does not match shape");
  }
  Raster r;
  r.width = im.width;
  r.height = im.height;
  r.channels = im.channels;
  r.depth = depth;
  const double top = depth == 16 ? 65535.0 : 255.0;
  r.bytes.resize(im.data.size() * static_cast<std::size_t>(depth / 8));
  for (std::size_t i = 0; i < im.data.size(); ++i) {
    const double v = std::isfinite(im.data[i]) ? std::clamp(im.data[i], 0.0, 1.0) : 0.0;
    const auto q = static_cast<unsigned>(std::lround(v * top));
    if (depth == 16) {
      r.bytes[2 * i] = static_cast<unsigned char>(q >> 8);
      r.bytes[2 * i + 1] = static_cast<unsigned char>(q & 0xff);
    } else {
      r.bytes[i] = static_cast<unsigned char>(q);
    }
  }
  return r;
}

// Next PGM header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream& is) {
  std::string tok;
  int c;
  while ((c = is.get()) != EOF) {
    if (c == '#') {
      while ((c = is.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

std::size_t pgm_number(std::istream& is, const fs::path& path) {
  const std::string tok = pgm_token(is);
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char ch) { return std::isdigit(ch); })) {
    throw FormatError(path.string() + ": malformed PGM header");
  }
  return std::stoul(tok);
}

Image read_pgm(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  const std::string magic = pgm_token(is);
  const bool binary = magic == "P5";
  const std::size_t width = pgm_number(is, path);
  const std::size_t height = pgm_number(is, path);
  const std::size_t maxval = pgm_number(is, path);
  if (width == 0 || height == 0 || maxval == 0 || maxval > 65535) {
    throw FormatError(path.string() + ": unsupported PGM dimensions or maxval");
  }
  Raster r;
  r.width = width;
  r.height = height;
  r.channels = 1;
  r.depth = maxval > 255 ? 16 : 8;
  const std::size_t n = width * height;
  if (binary) {
    r.bytes.resize(n * static_cast<std::size_t>(r.depth / 8));
    if (!is.read(reinterpret_cast<char*>(r.bytes.data()), static_cast<std::streamsize>(r.bytes.size()))) {
      throw FormatError(path.string() + ": truncated PGM payload");
    }
  } else {
    r.bytes.resize(n * 2);
    r.depth = 16;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t v = pgm_number(is, path);
      if (v > maxval) throw FormatError(path.string() + ": PGM sample exceeds maxval");
      r.bytes[2 * i] = static_cast<unsigned char>(v >> 8);
      r.bytes[2 * i + 1] = static_cast<unsigned char>(v & 0xff);
    }
  }
  return to_image(r, static_cast<double>(maxval));
}

template <typename T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is, const fs::path& path) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw FormatError(path.string() + ": truncated lifted-field file");
  }
  return v;
}

constexpr char kFieldMagic[8] = {'L', 'K', 'F', 'I', 'E', 'L', 'D', '1'};

}  // namespace

Image read_image(const fs::path& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw FormatError("cannot open image " + path.string());
  unsigned char sig[8] = {};
  probe.read(reinterpret_cast<char*>(sig), 8);
  const auto got = static_cast<std::size_t>(probe.gcount());
  probe.close();
  if (got >= 2 && sig[0] == 'P' && (sig[1] == '5' || sig[1] == '2')) return read_pgm(path);
  if (got < 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw FormatError(path.string() + ": neither PNG nor PGM");
  }
  std::FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) throw FormatError("cannot open image " + path.string());
  Raster r;
  const bool ok = png_decode(fp, &r);
  std::fclose(fp);
  if (!ok) throw FormatError(path.string() + ": corrupt PNG");
  if (r.channels != 1 && r.channels != 3) throw FormatError(path.string() + ": unsupported channel layout");
  return to_image(r, r.depth == 16 ? 65535.0 : 255.0);
}

void write_png(const fs::path& path, const Image& im, int bit_depth) {
  const Raster r = from_image(im, bit_depth);
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw FormatError("cannot write " + path.string());
  const bool ok = png_encode(fp, &r);
  const bool closed = std::fclose(fp) == 0;
  if (!ok || !closed) throw FormatError("PNG encoding failed for " + path.string());
}

void write_pgm(const fs::path& path, const Image& im, int bit_depth) {
  if (im.channels != 1) throw DimensionError("write_pgm: single-channel images only");
  const Raster r = from_image(im, bit_depth);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot write " + path.string());
  os << "P5\n" << r.width << ' ' << r.height << '\n' << (bit_depth == 16 ? 65535 : 255) << '\n';
  os.write(reinterpret_cast<const char*>(r.bytes.data()), static_cast<std::streamsize>(r.bytes.size()));
  if (!os) throw FormatError("write failed for " + path.string());
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot write " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n' << std::setprecision(17);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
  if (!os) throw FormatError("write failed for " + path.string());
}

void save_lifted(const fs::path& path, const LiftedMeasure& mu) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot write " + path.string());
  const auto& g = mu.grid;
  os.write(kFieldMagic, sizeof(kFieldMagic));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.domain_dims()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.range_dims()));
  for (auto n : g.domain_shape()) put<std::uint64_t>(os, n);
  for (double h : g.domain_spacing()) put<double>(os, h);
  for (auto n : g.range_shape()) put<std::uint64_t>(os, n);
  for (std::size_t k = 0; k < g.range_dims(); ++k) {
    for (double z : g.range_values(k)) put<double>(os, z);
  }
  const auto v = mu.values.component(0);
  os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!os) throw FormatError("write failed for " + path.string());
}

LiftedMeasure load_lifted(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kFieldMagic, 8) != 0) {
    throw FormatError(path.string() + ": bad lifted-field magic");
  }
  const auto d = get<std::uint32_t>(is, path);
  const auto s = get<std::uint32_t>(is, path);
  if (d == 0 || s == 0 || d > 8 || s > 8) throw FormatError(path.string() + ": implausible dimensions");
  std::vector<std::size_t> shape(d);
  std::vector<double> spacing(d);
  std::vector<std::size_t> counts(s);
  for (auto& n : shape) n = get<std::uint64_t>(is, path);
  for (auto& h : spacing) h = get<double>(is, path);
  for (auto& n : counts) {
    n = get<std::uint64_t>(is, path);
    if (n > (1u << 20)) throw FormatError(path.string() + ": implausible label count");
  }
  std::vector<std::vector<double>> labels(s);
  for (std::size_t k = 0; k < s; ++k) {
    labels[k].resize(counts[k]);
    for (double& z : labels[k]) z = get<double>(is, path);
  }
  ProductGrid grid(shape, spacing, labels);
  Field values = grid.scalar_field();
  auto v = values.component(0);
  if (!is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)))) {
    throw FormatError(path.string() + ": truncated lifted-field payload");
  }
  return LiftedMeasure(std::move(grid), std::move(values));
}

}  // namespace liftkit::io
