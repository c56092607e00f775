#pragma once

#include <stdexcept>
#include <string>

namespace wld {

/// Base for all library errors; callers that only care about failure can
/// catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller (bad k, out-of-range window, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation requested at a pole or removable singularity.
class PoleError : public Error {
 public:
  using Error::Error;
};

/// A truncated or adaptive computation did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A zero window is incomplete or does not cover what the caller needs.
class CoverageError : public Error {
 public:
  using Error::Error;
};

/// Monte Carlo histogram has bins with too few effective samples.
class SamplingError : public Error {
 public:
  using Error::Error;
};

}  // namespace wld
