#pragma once

#include <stdexcept>
#include <string>

namespace bstab {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside an operation's domain (bad coordinates, p < 1, tau <= 0, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A ProblemSpec that violates the spectral-shift condition or a family invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent scenario configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerical breakdown: singular solve, divergence, failed fit.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Picard iteration hit max_iter with the increment still above tolerance.
class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, double last_increment, int iterations)
      : NumericError(what), last_increment_(last_increment), iterations_(iterations) {}

  [[nodiscard]] double last_increment() const noexcept { return last_increment_; }
  [[nodiscard]] int iterations() const noexcept { return iterations_; }

 private:
  double last_increment_;
  int iterations_;
};

/// Decay fit window contains non-positive samples.
class FitError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Object used before a required piece of state was computed.
class StateError : public Error {
 public:
  using Error::Error;
};

}  // namespace bstab
