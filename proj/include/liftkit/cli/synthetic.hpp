#pragma once

#include <cstdint>
#include <filesystem>

#include "liftkit/image.hpp"

namespace liftkit::cli {

/// Sum of random plane waves around 0.5, clamped to [0, 1].
Image texture(std::size_t h, std::size_t w, std::uint64_t seed);

/// 14 random Gaussian blobs on a 0.5 background sampled at (r + sr, c + sc),
/// so blobs(n, a, b, s)(x) = blobs(n, 0, 0, s)(x + (a, b)).
Image blobs(std::size_t n, double sr, double sc, std::uint64_t seed);

/// out(r, c) = im(r + dr, c + dc) with nearest extension.
Image shifted(const Image& im, long dr, long dc);

/// Writes the demo inputs used by the example configs into `dir`:
/// noisy.png (piecewise constant plus Gaussian noise), left.png/right.png
/// (disparity 3), frame0.png/frame1.png (flow (1, -1)),
/// template.png/reference.png (translation (2, 2)).
void write_demo_inputs(const std::filesystem::path& dir, std::uint64_t seed);

}  // namespace liftkit::cli
