#pragma once

#include <stdexcept>
#include <string>

namespace fattail {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model or algorithm parameter lies outside its admissible domain.
class ParameterDomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration (CLI flags, config files, contract setup).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Operation not defined for the given input kind.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Numerical failures: a computation could not meet its accuracy contract.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// FFT grid too coarse or too narrow for the requested density.
class ResolutionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Sampler construction failed (e.g. the envelope does not majorize the pdf).
class SetupError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateInputError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InsufficientDataError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace fattail
