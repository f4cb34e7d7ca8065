#pragma once

#include <stdexcept>
#include <string>

namespace vqst {

// Shape/extent mismatches between tensors, states or operators.
struct dimension_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Bad argument values: out-of-range indices, wrong parameter vector length.
struct parameter_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// An operation was called on an object it does not support
// (e.g. a two-qubit gate handed to the single-qubit MPS update).
struct usage_error : std::logic_error {
  using std::logic_error::logic_error;
};

// Input value outside the mathematical domain of the operation.
struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

// Requested object would exceed the dense memory guard.
struct capacity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An iterative solver failed to reach its tolerance.
struct convergence_error : std::runtime_error {
  convergence_error(const std::string& what, double best_residual)
      : std::runtime_error(what), residual(best_residual) {}
  double residual;
};

// An internal invariant was violated; signals an upstream bug.
struct consistency_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid run configuration; carries the offending field path in what().
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace vqst
