#include "miseeker/models.hpp"

#include <cmath>

#include "miseeker/kernels/detail.hpp"

namespace miseeker {
namespace {

kernels::detail::SensorConsts sensor_consts(const SensorParams& p) {
  return {p.alpha, p.beta, std::log(p.gamma), p.r_var};
}

// Zero-covariance Gaussian: lets the single-pose queries reuse the exact
// arithmetic of the batched kernels, so h and H here agree bit for bit with
// what the filter computes.
kernels::detail::GaussianOne point_gaussian(const AgentState& a) {
  return {a.x, a.y, a.psi, {0.0, 0.0, 0.0, 0.0, 0.0, 0.0}};
}

void check_control(double bank, const MotionParams& m) {
  if (!(std::abs(bank) <= m.u_max)) throw ControlOutOfBounds();
}

}  // namespace

double max_bank_for_radius(double speed, double r_min, double g) {
  return std::atan(speed * speed / (g * r_min));
}

double bearing(const AgentState& a, const TargetPosition& t) {
  const double dx = t.x - a.x;
  const double dy = t.y - a.y;
  if (dx == 0.0 && dy == 0.0) return 0.0;
  return wrap_angle(std::atan2(dy, dx) - a.psi);
}

double snr_measure(const AgentState& a, const TargetPosition& t,
                   const SensorParams& p) {
  return kernels::detail::snr_moments_one(point_gaussian(a), t.x, t.y,
                                          sensor_consts(p))
      .mu;
}

Eigen::RowVector3d snr_jacobian(const AgentState& a, const TargetPosition& t,
                                const SensorParams& p) {
  const kernels::detail::MomentsOne m = kernels::detail::snr_moments_one(
      point_gaussian(a), t.x, t.y, sensor_consts(p));
  if (m.singular) throw JacobianSingular();
  return Eigen::RowVector3d(m.hx, m.hy, m.hp);
}

double heading_increment(double bank, const MotionParams& m) {
  return m.g / m.speed * std::tan(bank) * m.dt;
}

AgentState fixedwing_step(const AgentState& a, double bank,
                          const MotionParams& m) {
  check_control(bank, m);
  const kernels::detail::MotionStep ms{m.speed * m.dt,
                                       heading_increment(bank, m),
                                       {0.0, 0.0, 0.0, 0.0, 0.0, 0.0}};
  const kernels::detail::GaussianOne o =
      kernels::detail::propagate_one(point_gaussian(a), ms);
  return {o.mx, o.my, o.mpsi};
}

Eigen::Matrix3d fixedwing_jacobian(const AgentState& a, double bank,
                                   const MotionParams& m) {
  check_control(bank, m);
  const double v_dt = m.speed * m.dt;
  Eigen::Matrix3d f = Eigen::Matrix3d::Identity();
  f(0, 2) = -(v_dt * std::sin(a.psi));
  f(1, 2) = v_dt * std::cos(a.psi);
  return f;
}

}  // namespace miseeker
