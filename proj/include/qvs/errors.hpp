#pragma once

#include <stdexcept>
#include <string>

#include "qvs/vec.hpp"

namespace qvs {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent run configuration (unknown keys, out-of-range values).
struct ConfigError : Error {
  using Error::Error;
};

/// Continued envelope exceeded floating-point range during complex evaluation.
struct FieldOverflowError : Error {
  using Error::Error;
};

/// Adaptive quadrature could not reach the requested tolerance in budget.
struct QuadratureError : Error {
  using Error::Error;
};

/// Grid shape violates a precondition (asymmetric range, band off grid, ...).
struct GridError : Error {
  using Error::Error;
};

/// No azimuthal mode stands out above the noise floor.
struct FlatProfileError : Error {
  using Error::Error;
};

/// Turning-point search found no complex zeros in the region.
struct NoRootsError : Error {
  using Error::Error;
};

/// Turning-point search ran out of its iteration budget.
struct SeedBudgetError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

/// A single-mode integration failed; carries the momentum and the time
/// reached so sweeps can report the offending node.
struct SolveError : Error {
  enum class Kind { StepBudget, StepUnderflow };

  SolveError(Kind kind_, Vec3 k_, double t_, const std::string& msg)
      : Error(msg), kind(kind_), k(k_), t(t_) {}

  Kind kind;
  Vec3 k;
  double t;
};

}  // namespace qvs
