#pragma once

#include <Eigen/Dense>

#include "miseeker/errors.hpp"
#include "miseeker/math_util.hpp"

namespace miseeker {

/// Planar pose of one UAV. Heading is kept in (-pi, pi] by every operation
/// that writes it.
struct AgentState {
  double x = 0.0;    // m
  double y = 0.0;    // m
  double psi = 0.0;  // rad, wrapped to (-pi, pi]
};

struct TargetPosition {
  double x = 0.0;  // m
  double y = 0.0;  // m
};

/// SNR sensor constants: h(x, theta) = alpha * gamma^(-phi^2) / (range^2 + beta)
/// plus additive Gaussian noise of variance r_var.
struct SensorParams {
  double alpha = 1000.0;  // SNR scale
  double beta = 100.0;    // range softening, m^2
  double gamma = 3.375;   // bearing attenuation base, > 0
  double r_var = 2.0;     // measurement noise variance

  bool valid() const {
    return alpha > 0.0 && beta > 0.0 && gamma > 0.0 && r_var > 0.0;
  }
};

/// Returns the bank angle that yields turn radius r_min at speed v:
/// u = atan(v^2 / (g * r_min)).
double max_bank_for_radius(double speed, double r_min, double g);

/// Fixed-wing kinematics constants. q_cov is the process-noise covariance the
/// filter assumes (the world's true noise lives in the episode config).
struct MotionParams {
  double speed = 1.0;  // m/s
  double dt = 1.0;     // s
  double g = 9.81;     // m/s^2
  double u_max = max_bank_for_radius(1.0, 3.0, 9.81);  // rad
  Eigen::Matrix3d q_cov = Eigen::Matrix3d::Zero();

  bool valid() const {
    return speed > 0.0 && dt > 0.0 && g > 0.0 && u_max > 0.0 &&
           u_max < kPi / 2.0 && q_cov.isApprox(q_cov.transpose(), 1e-12);
  }
};

/// Angle between the agent's heading and the line of sight to the target,
/// in (-pi, pi]. Returns 0 by convention when the target coincides with the
/// agent position.
double bearing(const AgentState& a, const TargetPosition& t);

/// Noise-free expected SNR at the given geometry. Total on valid params;
/// equals alpha/beta at zero range (phi := 0 convention).
double snr_measure(const AgentState& a, const TargetPosition& t,
                   const SensorParams& p);

/// Gradient of snr_measure with respect to (x, y, psi).
/// Throws JacobianSingular at zero range, where the bearing derivative is
/// undefined even though the measurement itself is not.
Eigen::RowVector3d snr_jacobian(const AgentState& a, const TargetPosition& t,
                                const SensorParams& p);

/// Heading change of one step at the given bank angle: (g/V) tan(u) dt.
/// At u = u_max this equals V dt / r_min by construction.
double heading_increment(double bank, const MotionParams& m);

/// Deterministic one-step fixed-wing update:
///   x += V cos(psi) dt, y += V sin(psi) dt, psi += (g/V) tan(u) dt (wrapped).
/// Throws ControlOutOfBounds if |u| > u_max.
AgentState fixedwing_step(const AgentState& a, double bank,
                          const MotionParams& m);

/// State Jacobian of fixedwing_step: I + dt * d/dpsi terms (unit determinant).
Eigen::Matrix3d fixedwing_jacobian(const AgentState& a, double bank,
                                   const MotionParams& m);

}  // namespace miseeker
