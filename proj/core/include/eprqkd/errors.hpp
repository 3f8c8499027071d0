#pragma once

#include <stdexcept>
#include <string>

namespace eprqkd {

/// Configuration or input rejected before any computation ran.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed file contents (CSV, config). Message carries row/column context.
class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Calibration target cannot be reached with the given optics.
class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative or numerical procedure stopped without meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}

  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

}  // namespace eprqkd
