#pragma once

#include <stdexcept>
#include <string>

namespace spca {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: non-finite entries, zero vectors, bad sizes.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Signal length incompatible with the requested number of wavelet levels.
class InvalidLength : public Error {
 public:
  using Error::Error;
};

/// Argument outside the range where a closed-form bound is valid.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The top eigenvalue is not separated from the rest of the spectrum.
class DegenerateGap : public Error {
 public:
  using Error::Error;
};

/// The subset-selection step kept no coordinates.
class EmptySelection : public Error {
 public:
  using Error::Error;
};

/// An ECG cycle too short to resample.
class InvalidCycle : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

/// Every replicate of an experiment failed.
class ExperimentFailed : public Error {
 public:
  using Error::Error;
};

/// Iterative routine did not reach its tolerance; carries what it achieved.
class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, double residual)
      : Error(what + " (achieved residual " + std::to_string(residual) + ")"), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace spca
