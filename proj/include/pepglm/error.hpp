#pragma once

#include <stdexcept>
#include <string>

namespace pepglm {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Conformability problems between vectors and matrices.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Response values outside the support of the family.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Overflow, NaN or divergence inside a numerical routine.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Linear system or covariance without a usable factorization.
class SingularError : public Error {
 public:
  using Error::Error;
};

// Invalid prior, sampler or command-line configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input files.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pepglm
