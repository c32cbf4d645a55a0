#include "liftkit/image.hpp"

#include <algorithm>
#include <cmath>

namespace liftkit {

double Image::clamped(long row, long col, std::size_t c) const {
  const long r = std::clamp(row, 0L, static_cast<long>(height) - 1);
  const long k = std::clamp(col, 0L, static_cast<long>(width) - 1);
  return at(static_cast<std::size_t>(r), static_cast<std::size_t>(k), c);
}

double Image::bilinear(double row, double col, std::size_t c) const {
  const double r0 = std::floor(row);
  const double c0 = std::floor(col);
  const double fr = row - r0;
  const double fc = col - c0;
  const long r = static_cast<long>(r0);
  const long k = static_cast<long>(c0);
  const double top = (1.0 - fc) * clamped(r, k, c) + fc * clamped(r, k + 1, c);
  if (fr == 0.0) return top;
  const double bottom = (1.0 - fc) * clamped(r + 1, k, c) + fc * clamped(r + 1, k + 1, c);
  return (1.0 - fr) * top + fr * bottom;
}

}  // namespace liftkit
