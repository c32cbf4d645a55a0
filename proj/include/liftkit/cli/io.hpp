#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "liftkit/image.hpp"
#include "liftkit/lifted.hpp"

namespace liftkit::io {

/// Reads PNG (8/16-bit grayscale, 8-bit RGB; alpha dropped, palettes expanded)
/// or binary/ASCII PGM (maxval up to 65535). Intensities are scaled to [0, 1].
/// The format is detected from the file signature. Throws FormatError.
Image read_image(const std::filesystem::path& path);

/// Writes 1- or 3-channel PNG with 8 or 16 bits per sample; values are clamped
/// to [0, 1] and rounded.
void write_png(const std::filesystem::path& path, const Image& im, int bit_depth = 8);

/// Writes a binary PGM (P5); 8-bit unless bit_depth = 16. Single channel only.
void write_pgm(const std::filesystem::path& path, const Image& im, int bit_depth = 8);

/// Rows of numbers with a header line; values printed with 17 significant
/// digits.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Binary dump of a lifted density: magic "LKFIELD1", u32 d, u32 s,
/// u64 shape[d], f64 spacing[d], u64 labels[s], f64 label coordinates per
/// axis, f64 density per point. Little-endian.
void save_lifted(const std::filesystem::path& path, const LiftedMeasure& mu);
LiftedMeasure load_lifted(const std::filesystem::path& path);

}  // namespace liftkit::io
