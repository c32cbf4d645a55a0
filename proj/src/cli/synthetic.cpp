#include "liftkit/cli/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "liftkit/cli/io.hpp"

namespace liftkit::cli {

Image texture(std::size_t h, std::size_t w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::array<double, 4>> waves(8);
  for (auto& wv : waves) {
    wv = {0.2 + 0.8 * u(rng), 0.2 + 0.8 * u(rng), 6.3 * u(rng), 0.06 + 0.06 * u(rng)};
  }
  Image im(h, w);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double v = 0.5;
      for (const auto& wv : waves) {
        v += wv[3] * std::sin(wv[0] * static_cast<double>(r) + wv[1] * static_cast<double>(c) + wv[2]);
      }
      im.at(r, c) = std::clamp(v, 0.0, 1.0);
    }
  }
  return im;
}

Image blobs(std::size_t n, double sr, double sc, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::array<double, 4>> b;
  for (int i = 0; i < 14; ++i) {
    const double n_d = static_cast<double>(n);
    b.push_back({u(rng) * n_d, u(rng) * n_d, 1.5 + 2.5 * u(rng), u(rng) < 0.5 ? 1.0 : -1.0});
  }
  Image im(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      double v = 0.5;
      for (const auto& q : b) {
        const double dr = static_cast<double>(r) + sr - q[0];
        const double dc = static_cast<double>(c) + sc - q[1];
        v += 0.35 * q[3] * std::exp(-(dr * dr + dc * dc) / (2.0 * q[2] * q[2]));
      }
      im.at(r, c) = std::clamp(v, 0.0, 1.0);
    }
  }
  return im;
}

Image shifted(const Image& im, long dr, long dc) {
  Image out(im.height, im.width, im.channels);
  for (std::size_t r = 0; r < im.height; ++r) {
    for (std::size_t c = 0; c < im.width; ++c) {
      for (std::size_t k = 0; k < im.channels; ++k) {
        out.at(r, c, k) = im.clamped(static_cast<long>(r) + dr, static_cast<long>(c) + dc, k);
      }
    }
  }
  return out;
}

void write_demo_inputs(const std::filesystem::path& dir, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.08);
  Image noisy(48, 48);
  for (std::size_t r = 0; r < 48; ++r) {
    for (std::size_t c = 0; c < 48; ++c) {
      const double base = (r < 16 ? 0.2 : 0.7) + (c > 30 ? 0.15 : 0.0);
      noisy.at(r, c) = std::clamp(base + noise(rng), 0.0, 1.0);
    }
  }
  io::write_png(dir / "noisy.png", noisy, 16);

  const Image right = texture(32, 48, seed + 1);
  io::write_png(dir / "left.png", shifted(right, 0, -3), 16);
  io::write_png(dir / "right.png", right, 16);

  const Image frame1 = texture(24, 24, seed + 2);
  io::write_png(dir / "frame0.png", shifted(frame1, -1, 1), 16);
  io::write_png(dir / "frame1.png", frame1, 16);

  io::write_png(dir / "template.png", blobs(32, 0.0, 0.0, 3), 16);
  io::write_png(dir / "reference.png", blobs(32, 2.0, 2.0, 3), 16);
}

}  // namespace liftkit::cli
