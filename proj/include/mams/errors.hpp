#ifndef MAMS_ERRORS_HPP
#define MAMS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mams {

/// Invalid model, kernel or experiment parameters.
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite gradient or energy encountered while integrating.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a closed-form expression.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A series without variance was passed to an autocorrelation estimator.
class DegenerateSeriesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bias curves from different chains were recorded on different grids.
class AlignmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptation could not find a usable step size.
class TuningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mams

#endif  // MAMS_ERRORS_HPP
