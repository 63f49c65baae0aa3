#pragma once

#include <stdexcept>
#include <string>

namespace sublin {

/// Violated precondition or malformed input (bad shapes, empty domains, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Iteration did not converge, a linear solve failed, or an iterate left the
/// admissible cone.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A nonlinearity failed one of the structural hypotheses required by an
/// operation (monotonicity, sublinear growth, ...).
class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration file or command line problem.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sublin
