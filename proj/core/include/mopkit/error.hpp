#pragma once

#include <stdexcept>
#include <string>

namespace mopkit {

// All library failures derive from Error so callers (the CLI in particular)
// can map families of failures onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated a documented precondition (bad index, missing moments, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Point outside the domain where an operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A weight system or equilibrium problem could not be built as requested.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// Numerical procedure failed to reach its tolerance.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double achieved_error)
      : Error(what), achieved_error_(achieved_error) {}
  explicit NumericError(const std::string& what) : NumericError(what, 0.0) {}

  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

/// D_n vanishes (to the singularity threshold): the multi-index is not normal.
class NonNormalIndexError : public NumericError {
 public:
  NonNormalIndexError(const std::string& what, double determinant)
      : NumericError(what), determinant_(determinant) {}

  double determinant() const noexcept { return determinant_; }

 private:
  double determinant_;
};

/// Newton polishing could not bring |P(root)| under tolerance.
class RefinementError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// MCMC could not find a starting configuration with positive density.
class InitializationError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace mopkit
