#pragma once

#include <stdexcept>
#include <string>

namespace slipconvect {

/// Malformed input text (config, plan, snapshot).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter violates a documented invariant; the message names it.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure inside a solver: singular system, blow-up, CFL breach,
/// non-converged wall coupling.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Neumann problem whose data fail the discrete divergence theorem.
class SolvabilityError : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace slipconvect
