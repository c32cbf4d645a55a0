#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace liftkit {

/// Extended real number: a finite double or +infinity. Infinity is carried in
/// a dedicated flag so it never arises from overflow.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  constexpr ExtReal(double v) : value_(v) {}  // NOLINT: implicit from finite values

  static constexpr ExtReal infinity() {
    ExtReal r;
    r.infinite_ = true;
    return r;
  }

  constexpr bool is_infinite() const noexcept { return infinite_; }
  constexpr bool is_finite() const noexcept { return !infinite_; }
  /// Finite value; meaningless when is_infinite().
  constexpr double value() const noexcept { return value_; }
  /// Finite value, or `fallback` when infinite.
  constexpr double value_or(double fallback) const noexcept {
    return infinite_ ? fallback : value_;
  }

  friend constexpr ExtReal operator+(ExtReal a, ExtReal b) {
    if (a.infinite_ || b.infinite_) return infinity();
    return ExtReal(a.value_ + b.value_);
  }
  ExtReal& operator+=(ExtReal b) { return *this = *this + b; }
  /// Scaling by a nonnegative factor; 0 * inf is taken as inf.
  friend constexpr ExtReal operator*(double c, ExtReal a) {
    if (a.infinite_) return infinity();
    return ExtReal(c * a.value_);
  }

  friend constexpr bool operator<=(ExtReal a, ExtReal b) {
    if (b.infinite_) return true;
    if (a.infinite_) return false;
    return a.value_ <= b.value_;
  }
  friend constexpr bool operator==(ExtReal a, ExtReal b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

enum class RegularizerKind {
  NuclearNorm,     // eta(p) = w * ||p||_*
  SquaredL2Half,   // eta(p) = w * ||p||_2^2 / 2
  PowerCost,       // eta(p) = w * ||p||_2^e / e, e > 1
};

/// Integrand f(t, p) = rho(t) + eta(p) in data-plus-regularizer split form.
///
/// rho is sampled at every grid point t (flat point index); a single sample is
/// broadcast to all points. The tensor p has
/// shape `tensor_dims`; the nuclear/spectral norms treat it as a matrix with
/// the last axis as columns and all leading axes flattened into rows.
class Integrand {
 public:
  Integrand(RegularizerKind kind, std::vector<std::size_t> tensor_dims, std::vector<double> rho,
            double weight = 1.0, double exponent = 2.0);

  RegularizerKind kind() const noexcept { return kind_; }
  const std::vector<std::size_t>& tensor_dims() const noexcept { return dims_; }
  std::size_t tensor_size() const noexcept { return size_; }
  std::size_t matrix_rows() const noexcept { return rows_; }
  std::size_t matrix_cols() const noexcept { return cols_; }
  double weight() const noexcept { return weight_; }
  double exponent() const noexcept { return exponent_; }
  /// Conjugate exponent q with 1/p + 1/q = 1.
  double conjugate_exponent() const noexcept { return exponent_ / (exponent_ - 1.0); }

  std::size_t num_points() const noexcept { return rho_.size(); }
  double rho(std::size_t t) const { return rho_.size() == 1 ? rho_[0] : rho_.at(t); }
  const std::vector<double>& rho_values() const noexcept { return rho_; }

  /// eta(p) alone.
  double regularizer(std::span<const double> p) const;
  /// f(t, p) = rho(t) + eta(p).
  double value(std::size_t t, std::span<const double> p) const;
  /// f*(t, xi) = sup_p <xi, p> - f(t, p).
  ExtReal conjugate(std::size_t t, std::span<const double> xi) const;
  /// Gradient of xi -> f*(t, xi) where finite and smooth (not for NuclearNorm).
  void conjugate_gradient(std::span<const double> xi, std::span<double> grad) const;
  /// f^inf(t, xi) = lim_{r -> 0+} r f(t, xi / r).
  ExtReal recession(std::size_t t, std::span<const double> xi) const;
  /// lam * f(t, xi / lam) for lam > 0, recession for lam = 0, +inf for lam < 0.
  ExtReal perspective(std::size_t t, std::span<const double> xi, double lam) const;
  /// conjugate(t, xi) + lam <= tol.
  bool dual_feasible(std::size_t t, std::span<const double> xi, double lam, double tol) const;

  /// Dual norm bound of the nuclear regularizer (|| xi ||_sigma <= weight).
  double spectral_radius() const noexcept { return weight_; }

 private:
  void check(std::span<const double> p) const;
  double norm_for_kind(std::span<const double> p) const;

  RegularizerKind kind_;
  std::vector<std::size_t> dims_;
  std::size_t size_ = 1;
  std::size_t rows_ = 1;
  std::size_t cols_ = 1;
  std::vector<double> rho_;
  double weight_;
  double exponent_;
};

}  // namespace liftkit
