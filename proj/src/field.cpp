#include "liftkit/field.hpp"

#include <algorithm>
#include <cmath>

#include "liftkit/error.hpp"
#include "liftkit/simd/kernels.hpp"

namespace liftkit {

void Field::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double dot(const Field& a, const Field& b) {
  if (!a.same_shape(b)) throw DimensionError("dot: field shape mismatch");
  return dot(a.values(), b.values());
}

double norm2(const Field& a) { return std::sqrt(dot(a, a)); }

double max_abs(const Field& a) {
  return simd::active().max_abs(a.values().data(), a.size());
}

void axpy(Field& a, double s, const Field& b) {
  if (!a.same_shape(b)) throw DimensionError("axpy: field shape mismatch");
  simd::active().scale_acc(a.values().data(), b.values().data(), s, a.size());
}

}  // namespace liftkit
