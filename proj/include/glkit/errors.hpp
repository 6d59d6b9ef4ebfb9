#pragma once

#include <stdexcept>
#include <string>

namespace glkit {

// Base class for everything thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Instance data is malformed (bad dimensions, cyclic DAG, non-binary vector, ...).
struct InvalidInstance : Error {
  using Error::Error;
};

// Enumeration would exceed the configured cap.
struct TooLarge : Error {
  using Error::Error;
};

// The decision set is empty (e.g. no s-t path exists).
struct EmptySet : Error {
  using Error::Error;
};

// Structure supports neither an exact DP nor enumeration within the cap.
struct OracleUnavailable : Error {
  using Error::Error;
};

// discretize() received a non-positive entry.
struct NonPositiveEntry : Error {
  using Error::Error;
};

// The sampled identity q'lift(x) = gap(x) failed; the hull is wrong.
struct IdentityViolation : Error {
  using Error::Error;
};

// An iterative numerical routine failed to converge.
struct NumericFailure : Error {
  using Error::Error;
};

// h_x(w) requested with some required w_i <= 0.
struct DivisionGuard : Error {
  using Error::Error;
};

// Both the greedy decomposition and the exact fallback failed.
struct DecompositionFailure : Error {
  using Error::Error;
};

// Some coordinate is selected by no decision; callers must drop it first.
struct UncoveredCoordinate : Error {
  using Error::Error;
};

// A hard iteration budget was hit before the schedule completed.
struct IterationBudgetExhausted : Error {
  using Error::Error;
};

}  // namespace glkit
