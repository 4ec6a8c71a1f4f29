#pragma once

#include <stdexcept>
#include <string>

namespace auxinet {

// Config text or CLI arguments failed validation before any numerics ran.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Geometry that cannot produce a usable grid (degenerate bbox, rows < 2, ...).
struct GeometryError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Per-vertex or per-edge array does not match the graph it was handed with.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Balance precondition violated, e.g. net source strength not zero where the
// pressure problem requires it.
struct ConservationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Linear system has no unique solution (disconnected conductance subgraph,
// factorization breakdown, residual check failed).
struct SingularSystemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Time integration could not continue: step size underflow, Newton refusing
// to converge with a fresh Jacobian, or non-finite state.
struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// State left the admissible set in a way the step guard cannot repair
// (e.g. a conductance pinned at zero while its growth term still diverges).
struct InvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace auxinet
