#pragma once

#include <stdexcept>
#include <string>

namespace netinf {

// Base for every error raised by the library. The CLI maps ConfigError to
// exit code 2 and everything else derived from Error to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Raised when a matrix that must have spectral radius < 1 does not.
class StabilityError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefiniteError : public Error {
 public:
  using Error::Error;
};

// Generic numerical failure (non-convergence, out-of-range intermediate).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Edge-probability matrix with an all-zero or all-one denominator.
class DegeneratePriorError : public Error {
 public:
  using Error::Error;
};

// A batch of truths with no edges (or no non-edges) in aggregate.
class DegenerateBatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace netinf
