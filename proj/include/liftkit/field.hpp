#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace liftkit {

/// Multi-component field over a set of grid points, stored component-major:
/// component c occupies the contiguous range [c * points, (c + 1) * points).
/// Tensor-valued fields flatten their tensor index row-major into c.
class Field {
 public:
  Field() = default;
  Field(std::size_t points, std::size_t components, double fill = 0.0)
      : points_(points), components_(components), data_(points * components, fill) {}

  std::size_t points() const noexcept { return points_; }
  std::size_t components() const noexcept { return components_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<double> component(std::size_t c) {
    return {data_.data() + c * points_, points_};
  }
  std::span<const double> component(std::size_t c) const {
    return {data_.data() + c * points_, points_};
  }

  double& operator()(std::size_t c, std::size_t p) { return data_[c * points_ + p]; }
  double operator()(std::size_t c, std::size_t p) const { return data_[c * points_ + p]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool same_shape(const Field& other) const noexcept {
    return points_ == other.points_ && components_ == other.components_;
  }

  void fill(double v);

  friend bool operator==(const Field&, const Field&) = default;

 private:
  std::size_t points_ = 0;
  std::size_t components_ = 0;
  std::vector<double> data_;
};

/// Plain (unweighted) inner product over all entries.
double dot(const Field& a, const Field& b);
double dot(std::span<const double> a, std::span<const double> b);
double norm2(const Field& a);
double max_abs(const Field& a);
/// a += s * b
void axpy(Field& a, double s, const Field& b);

}  // namespace liftkit
