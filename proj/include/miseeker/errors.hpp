#pragma once

#include <stdexcept>
#include <string>

namespace miseeker {

/// Base class for all recoverable errors raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bank-angle command outside [-u_max, u_max].
struct ControlOutOfBounds : Error {
  ControlOutOfBounds() : Error("control-out-of-bounds") {}
};

/// Measurement Jacobian requested at zero range (bearing undefined).
struct JacobianSingular : Error {
  JacobianSingular() : Error("jacobian-singular") {}
};

/// Every particle likelihood underflowed to zero; the filter diverged.
struct WeightCollapse : Error {
  WeightCollapse() : Error("weight-collapse") {}
};

/// Candidate measurement covariance lost positive definiteness.
struct MomentDegenerate : Error {
  MomentDegenerate() : Error("moment-degenerate") {}
};

/// Every candidate action was scored -inf; nothing to choose.
struct PlannerStarved : Error {
  PlannerStarved() : Error("planner-starved") {}
};

/// Invalid or unreadable configuration.
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace miseeker
