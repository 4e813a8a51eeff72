#pragma once

#include <stdexcept>
#include <string>

namespace wishratio {

/// Invalid user-supplied parameters (dimensions, degrees of freedom,
/// hypergeometric parameter poles, malformed partitions, ...).
class parameter_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation point on (or too close to) the singular locus of the
/// differential operators: coincident coordinates, or a coordinate at 0/1.
class singularity_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The series stage could not produce a usable starting value.
class initialization_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The ODE stage failed (step-size underflow, non-finite state).
class integration_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wishratio
