#include "liftkit/integrand.hpp"

#include <cmath>

#include "liftkit/error.hpp"
#include "liftkit/linalg.hpp"

namespace liftkit {

Integrand::Integrand(RegularizerKind kind, std::vector<std::size_t> tensor_dims,
                     std::vector<double> rho, double weight, double exponent)
    : kind_(kind), dims_(std::move(tensor_dims)), rho_(std::move(rho)), weight_(weight),
      exponent_(exponent) {
  if (dims_.empty()) throw DimensionError("integrand: tensor_dims must be non-empty");
  size_ = 1;
  for (std::size_t n : dims_) {
    if (n == 0) throw DimensionError("integrand: zero-sized tensor axis");
    size_ *= n;
  }
  cols_ = dims_.back();
  rows_ = size_ / cols_;
  if (!(weight_ > 0.0)) throw UnsupportedConfigurationError("integrand: weight must be > 0");
  if (kind_ == RegularizerKind::PowerCost && !(exponent_ > 1.0)) {
    throw UnsupportedConfigurationError("integrand: PowerCost needs exponent > 1");
  }
  for (double r : rho_) {
    if (!(r >= 0.0)) throw RangeError("integrand: data cost must be nonnegative and finite");
  }
}

void Integrand::check(std::span<const double> p) const {
  if (p.size() != size_) throw DimensionError("integrand: tensor size does not match tensor_dims");
}

double Integrand::norm_for_kind(std::span<const double> p) const {
  if (kind_ == RegularizerKind::NuclearNorm) return linalg::nuclear_norm(p, rows_, cols_);
  return linalg::frobenius_norm(p);
}

double Integrand::regularizer(std::span<const double> p) const {
  check(p);
  const double n = norm_for_kind(p);
  switch (kind_) {
    case RegularizerKind::NuclearNorm:
      return weight_ * n;
    case RegularizerKind::SquaredL2Half:
      return 0.5 * weight_ * n * n;
    case RegularizerKind::PowerCost:
      return weight_ * std::pow(n, exponent_) / exponent_;
  }
  return 0.0;
}

double Integrand::value(std::size_t t, std::span<const double> p) const {
  return rho(t) + regularizer(p);
}

ExtReal Integrand::conjugate(std::size_t t, std::span<const double> xi) const {
  check(xi);
  const double r = rho(t);
  switch (kind_) {
    case RegularizerKind::NuclearNorm: {
      const double s = linalg::spectral_norm(xi, rows_, cols_);
      if (s <= weight_ * (1.0 + 1e-12)) return ExtReal(-r);
      return ExtReal::infinity();
    }
    case RegularizerKind::SquaredL2Half: {
      const double n = linalg::frobenius_norm(xi);
      return ExtReal(0.5 * n * n / weight_ - r);
    }
    case RegularizerKind::PowerCost: {
      const double q = conjugate_exponent();
      const double n = linalg::frobenius_norm(xi);
      return ExtReal(std::pow(weight_, 1.0 - q) * std::pow(n, q) / q - r);
    }
  }
  return ExtReal::infinity();
}

void Integrand::conjugate_gradient(std::span<const double> xi, std::span<double> grad) const {
  check(xi);
  if (grad.size() != size_) throw DimensionError("integrand: gradient storage size");
  switch (kind_) {
    case RegularizerKind::NuclearNorm:
      throw UnsupportedConfigurationError("integrand: nuclear conjugate is an indicator");
    case RegularizerKind::SquaredL2Half:
      for (std::size_t i = 0; i < size_; ++i) grad[i] = xi[i] / weight_;
      return;
    case RegularizerKind::PowerCost: {
      const double q = conjugate_exponent();
      const double n = linalg::frobenius_norm(xi);
      const double f = n > 0.0 ? std::pow(weight_, 1.0 - q) * std::pow(n, q - 2.0) : 0.0;
      for (std::size_t i = 0; i < size_; ++i) grad[i] = f * xi[i];
      return;
    }
  }
}

ExtReal Integrand::recession(std::size_t t, std::span<const double> xi) const {
  check(xi);
  (void)rho(t);
  if (kind_ == RegularizerKind::NuclearNorm) return ExtReal(weight_ * norm_for_kind(xi));
  // Superlinear regularizers: finite only at xi = 0.
  for (double v : xi) {
    if (v != 0.0) return ExtReal::infinity();
  }
  return ExtReal(0.0);
}

ExtReal Integrand::perspective(std::size_t t, std::span<const double> xi, double lam) const {
  check(xi);
  if (lam < 0.0) return ExtReal::infinity();
  if (lam == 0.0) return recession(t, xi);
  const double r = rho(t);
  const double n = norm_for_kind(xi);
  switch (kind_) {
    case RegularizerKind::NuclearNorm:
      return ExtReal(lam * r + weight_ * n);
    case RegularizerKind::SquaredL2Half:
      return ExtReal(lam * r + 0.5 * weight_ * n * n / lam);
    case RegularizerKind::PowerCost:
      return ExtReal(lam * r + weight_ * std::pow(n, exponent_) /
                                   (exponent_ * std::pow(lam, exponent_ - 1.0)));
  }
  return ExtReal::infinity();
}

bool Integrand::dual_feasible(std::size_t t, std::span<const double> xi, double lam,
                              double tol) const {
  const ExtReal c = conjugate(t, xi);
  if (c.is_infinite()) return false;
  return c.value() + lam <= tol;
}

}  // namespace liftkit
