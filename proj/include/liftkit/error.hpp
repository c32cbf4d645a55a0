#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace liftkit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Field or tensor shapes that do not match the grid or each other.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value lies outside the admissible range box (labels, image width, ...).
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Iterative numerics failed (root finder, eigensolver, SVD).
class NumericError : public Error {
 public:
  using Error::Error;
};

class DegenerateMeasureError : public Error {
 public:
  using Error::Error;
};

class UnsupportedConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Malformed file contents (bad magic, truncated payload, ...).
class FormatError : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t iteration)
      : Error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace liftkit
