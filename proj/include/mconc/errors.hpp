#pragma once

#include <stdexcept>
#include <string>

namespace mconc {

// Base of every error thrown by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotHermitianError : public Error {
 public:
  NotHermitianError(double max_asymmetry, double tolerance)
      : Error("matrix is not Hermitian: max |a_ij - conj(a_ji)| = " + std::to_string(max_asymmetry) +
              " exceeds tolerance " + std::to_string(tolerance)),
        max_asymmetry_(max_asymmetry) {}

  double max_asymmetry() const { return max_asymmetry_; }

 private:
  double max_asymmetry_;
};

// A scalar function or precondition is undefined on the given input (e.g. x^{1/2} at x < 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Stated hypothesis of a bound is violated (e.g. ||D||_1 >= 1).
class HypothesisViolation : public Error {
 public:
  using Error::Error;
};

class EnumerationCapError : public Error {
 public:
  using Error::Error;
};

// Eigensolver failure, non-finite intermediate, truncation tail not reached.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace mconc
