#ifndef GCHLAB_ERRORS_HPP
#define GCHLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gchlab {

/// Invalid user input: bad config key, shape mismatch, out-of-range parameter.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A field went NaN/Inf during a solve.
class DivergedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Post-processing could not produce a trustworthy estimate.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gchlab

#endif  // GCHLAB_ERRORS_HPP
