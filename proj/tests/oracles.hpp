#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "miseeker/belief.hpp"
#include "miseeker/models.hpp"

// Reference implementations the tests score the library against. Everything
// here is deliberately written a different way than the library: angles wrap
// through std::remainder, the sensor response goes through std::pow,
// Jacobians come from central differences on the forward maps, the Kalman
// correction uses the Joseph form, and mixture statistics are plain dense
// loops over full Eigen matrices. Slow and obvious on purpose.

namespace oracle {

inline double wrap(double a) {
  const double w = std::remainder(a, 2.0 * M_PI);
  return w <= -M_PI ? w + 2.0 * M_PI : w;
}

inline double snr(const miseeker::AgentState& a,
                  const miseeker::TargetPosition& t,
                  const miseeker::SensorParams& p) {
  const double dx = t.x - a.x;
  const double dy = t.y - a.y;
  const double phi = wrap(std::atan2(dy, dx) - a.psi);
  return p.alpha * std::pow(p.gamma, -phi * phi) / (dx * dx + dy * dy + p.beta);
}

inline Eigen::Vector3d step(const Eigen::Vector3d& s, double u,
                            const miseeker::MotionParams& m) {
  Eigen::Vector3d out;
  out(0) = s(0) + m.speed * m.dt * std::cos(s(2));
  out(1) = s(1) + m.speed * m.dt * std::sin(s(2));
  out(2) = wrap(s(2) + m.dt * m.g * std::tan(u) / m.speed);
  return out;
}

/// Central-difference row d snr / d (agent state).
inline Eigen::RowVector3d fd_snr_jacobian(const miseeker::AgentState& a,
                                          const miseeker::TargetPosition& t,
                                          const miseeker::SensorParams& p,
                                          double h = 1e-5) {
  Eigen::RowVector3d j;
  for (int c = 0; c < 3; ++c) {
    miseeker::AgentState lo = a, hi = a;
    (c == 0 ? hi.x : c == 1 ? hi.y : hi.psi) += h;
    (c == 0 ? lo.x : c == 1 ? lo.y : lo.psi) -= h;
    j(c) = (snr(hi, t, p) - snr(lo, t, p)) / (2.0 * h);
  }
  return j;
}

/// Central-difference matrix d step / d state. The heading column differences
/// sin/cos smoothly, so the wrap in step() is harmless away from +-pi.
inline Eigen::Matrix3d fd_step_jacobian(const Eigen::Vector3d& s, double u,
                                        const miseeker::MotionParams& m,
                                        double h = 1e-5) {
  Eigen::Matrix3d f;
  for (int c = 0; c < 3; ++c) {
    Eigen::Vector3d lo = s, hi = s;
    hi(c) += h;
    lo(c) -= h;
    f.col(c) = (step(hi, u, m) - step(lo, u, m)) / (2.0 * h);
  }
  return f;
}

/// Time update with the finite-difference Jacobian.
inline void predict(const Eigen::Vector3d& mean, const Eigen::Matrix3d& cov,
                    double u, const miseeker::MotionParams& m,
                    Eigen::Vector3d& mean_out, Eigen::Matrix3d& cov_out) {
  const Eigen::Matrix3d f = fd_step_jacobian(mean, u, m);
  mean_out = step(mean, u, m);
  cov_out = f * cov * f.transpose() + m.q_cov;
}

/// Predicted scalar-measurement moments with the finite-difference row.
inline void moments(const Eigen::Vector3d& mean, const Eigen::Matrix3d& cov,
                    const miseeker::TargetPosition& t,
                    const miseeker::SensorParams& p, double& mu, double& var) {
  const miseeker::AgentState a{mean(0), mean(1), mean(2)};
  const Eigen::RowVector3d h = fd_snr_jacobian(a, t, p);
  mu = snr(a, t, p);
  var = (h * cov * h.transpose())(0, 0) + p.r_var;
}

/// Joseph-form Kalman correction (the library uses the short form).
inline void correct(const Eigen::Vector3d& mean, const Eigen::Matrix3d& cov,
                    double z, const miseeker::TargetPosition& t,
                    const miseeker::SensorParams& p, Eigen::Vector3d& mean_out,
                    Eigen::Matrix3d& cov_out) {
  const miseeker::AgentState a{mean(0), mean(1), mean(2)};
  const Eigen::RowVector3d h = fd_snr_jacobian(a, t, p);
  const double s = (h * cov * h.transpose())(0, 0) + p.r_var;
  const Eigen::Vector3d k = cov * h.transpose() / s;
  mean_out = mean + k * (z - snr(a, t, p));
  const Eigen::Matrix3d ikh = Eigen::Matrix3d::Identity() - k * h;
  cov_out = ikh * cov * ikh.transpose() + k * p.r_var * k.transpose();
}

/// Dense moment matching of the weighted per-particle measurement mixture.
/// mus/vars are [agent][particle].
inline void mixture(const std::vector<double>& w,
                    const std::vector<std::vector<double>>& mus,
                    const std::vector<std::vector<double>>& vars,
                    Eigen::VectorXd& mean, Eigen::MatrixXd& cov) {
  const std::size_t nv = mus.size();
  const std::size_t np = w.size();
  mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nv));
  cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nv),
                              static_cast<Eigen::Index>(nv));
  for (std::size_t i = 0; i < nv; ++i)
    for (std::size_t k = 0; k < np; ++k)
      mean(static_cast<Eigen::Index>(i)) += w[k] * mus[i][k];
  for (std::size_t i = 0; i < nv; ++i) {
    for (std::size_t j = 0; j < nv; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < np; ++k) {
        const double di = mus[i][k] - mean(static_cast<Eigen::Index>(i));
        const double dj = mus[j][k] - mean(static_cast<Eigen::Index>(j));
        acc += w[k] * (di * dj + (i == j ? vars[i][k] : 0.0));
      }
      cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acc;
    }
  }
}

/// Information score via the mixture determinant minus the expected
/// conditional log-variance sum.
inline double objective(const std::vector<double>& w,
                        const std::vector<std::vector<double>>& mus,
                        const std::vector<std::vector<double>>& vars) {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  mixture(w, mus, vars, mean, cov);
  double cond = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < mus.size(); ++i) s += std::log(vars[i][k]);
    cond += w[k] * s;
  }
  return std::log(cov.determinant()) - cond;
}

/// Two-pass tie-aware argmax: candidates within margin * max(1, |max|) of
/// the global maximum form the tie set, and u in [0, 1) picks one by
/// enumeration rank. The default u = 0 keeps the earliest tied index.
inline std::size_t argmax_with_margin(const std::vector<double>& scores,
                                      double margin, double u = 0.0) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  const double cut =
      scores[best] - margin * std::max(1.0, std::abs(scores[best]));
  std::vector<std::size_t> ties;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] > cut) ties.push_back(i);
  }
  if (ties.empty()) return best;
  std::size_t r =
      static_cast<std::size_t>(u * static_cast<double>(ties.size()));
  if (r >= ties.size()) r = ties.size() - 1;
  return ties[r];
}

/// Extracts [agent][particle] mean/variance tables from a library batch.
inline void tables(const std::vector<miseeker::MomentsBatch>& mb,
                   std::vector<std::vector<double>>& mus,
                   std::vector<std::vector<double>>& vars) {
  mus.clear();
  vars.clear();
  for (const miseeker::MomentsBatch& b : mb) {
    mus.push_back(b.mu);
    vars.push_back(b.var);
  }
}

}  // namespace oracle
