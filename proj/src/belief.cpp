#include "miseeker/belief.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "miseeker/kernels/detail.hpp"

namespace miseeker {

using kernels::detail::GaussianOne;
using kernels::detail::MomentsOne;
using kernels::detail::MotionStep;
using kernels::detail::SensorConsts;

namespace {

SensorConsts sensor_consts(const SensorParams& p) {
  return {p.alpha, p.beta, std::log(p.gamma), p.r_var};
}

void check_control(double u, const MotionParams& m) {
  if (!(std::abs(u) <= m.u_max)) throw ControlOutOfBounds();
}

MotionStep make_motion_step(double u, const MotionParams& m) {
  check_control(u, m);
  const Eigen::Matrix3d& q = m.q_cov;
  return {m.speed * m.dt,
          heading_increment(u, m),
          {q(0, 0), q(0, 1), q(0, 2), q(1, 1), q(1, 2), q(2, 2)}};
}

GaussianOne to_one(const GaussianBelief& b) {
  const Eigen::Matrix3d& c = b.cov;
  return {b.mean(0),
          b.mean(1),
          b.mean(2),
          {c(0, 0), 0.5 * (c(0, 1) + c(1, 0)), 0.5 * (c(0, 2) + c(2, 0)),
           c(1, 1), 0.5 * (c(1, 2) + c(2, 1)), c(2, 2)}};
}

GaussianBelief from_one(const GaussianOne& g) {
  GaussianBelief b;
  b.mean << g.mx, g.my, g.mpsi;
  b.cov << g.c.xx, g.c.xy, g.c.xp, g.c.xy, g.c.yy, g.c.yp, g.c.xp, g.c.yp,
      g.c.pp;
  return b;
}

// All-principal-minors screen with relative slack: catches materially
// indefinite covariances while letting rounding dust through untouched.
bool psd_plausible(double xx, double xy, double xp, double yy, double yp,
                   double pp) {
  const double s = std::max({std::abs(xx), std::abs(yy), std::abs(pp)});
  const double t1 = 1e-12 * s;
  if (xx < -t1 || yy < -t1 || pp < -t1) return false;
  const double t2 = 1e-12 * s * s;
  if (xx * yy - xy * xy < -t2) return false;
  if (xx * pp - xp * xp < -t2) return false;
  if (yy * pp - yp * yp < -t2) return false;
  const double det = xx * (yy * pp - yp * yp) - xy * (xy * pp - yp * xp) +
                     xp * (xy * yp - yy * xp);
  return det >= -1e-12 * s * s * s;
}

}  // namespace

void GaussianBank::resize(std::size_t n) {
  mx_.resize(n);
  my_.resize(n);
  mpsi_.resize(n);
  cxx_.resize(n);
  cxy_.resize(n);
  cxp_.resize(n);
  cyy_.resize(n);
  cyp_.resize(n);
  cpp_.resize(n);
}

GaussianBelief GaussianBank::get(std::size_t k) const {
  return from_one({mx_[k], my_[k], mpsi_[k],
                   {cxx_[k], cxy_[k], cxp_[k], cyy_[k], cyp_[k], cpp_[k]}});
}

void GaussianBank::set(std::size_t k, const GaussianBelief& b) {
  const GaussianOne g = to_one(b);
  mx_[k] = g.mx;
  my_[k] = g.my;
  mpsi_[k] = g.mpsi;
  cxx_[k] = g.c.xx;
  cxy_[k] = g.c.xy;
  cxp_[k] = g.c.xp;
  cyy_[k] = g.c.yy;
  cyp_[k] = g.c.yp;
  cpp_[k] = g.c.pp;
}

void GaussianBank::fill(const GaussianBelief& b) {
  for (std::size_t k = 0; k < size(); ++k) set(k, b);
}

void GaussianBank::gather_from(const GaussianBank& src,
                               const std::vector<std::uint32_t>& idx) {
  resize(idx.size());
  for (std::size_t m = 0; m < idx.size(); ++m) {
    const std::uint32_t k = idx[m];
    mx_[m] = src.mx_[k];
    my_[m] = src.my_[k];
    mpsi_[m] = src.mpsi_[k];
    cxx_[m] = src.cxx_[k];
    cxy_[m] = src.cxy_[k];
    cxp_[m] = src.cxp_[k];
    cyy_[m] = src.cyy_[k];
    cyp_[m] = src.cyp_[k];
    cpp_[m] = src.cpp_[k];
  }
}

kernels::BankView GaussianBank::view() {
  return {mx_.data(),  my_.data(),  mpsi_.data(), cxx_.data(), cxy_.data(),
          cxp_.data(), cyy_.data(), cyp_.data(),  cpp_.data(), size()};
}

kernels::ConstBankView GaussianBank::view() const {
  return {mx_.data(),  my_.data(),  mpsi_.data(), cxx_.data(), cxy_.data(),
          cxp_.data(), cyy_.data(), cyp_.data(),  cpp_.data(), size()};
}

void MomentsBatch::resize(std::size_t n) {
  mu.resize(n);
  var.resize(n);
  hx.resize(n);
  hy.resize(n);
  hp.resize(n);
  singular.resize(n);
}

bool MomentsBatch::any_singular() const {
  return std::find(singular.begin(), singular.end(), std::uint8_t{1}) !=
         singular.end();
}

kernels::MomentsView MomentsBatch::view() {
  return {mu.data(), var.data(),      hx.data(), hy.data(),
          hp.data(), singular.data(), size()};
}

kernels::ConstMomentsView MomentsBatch::view() const {
  return {mu.data(), var.data(),      hx.data(), hy.data(),
          hp.data(), singular.data(), size()};
}

GaussianBelief ekf_predict(const GaussianBelief& b, double u,
                           const MotionParams& m) {
  return from_one(
      kernels::detail::propagate_one(to_one(b), make_motion_step(u, m)));
}

MeasurementMoments predicted_measurement_moments(const GaussianBelief& prior,
                                                 const TargetPosition& theta,
                                                 const SensorParams& p) {
  const MomentsOne o = kernels::detail::snr_moments_one(
      to_one(prior), theta.x, theta.y, sensor_consts(p));
  if (o.singular) throw JacobianSingular();
  return {o.mu, o.var};
}

GaussianBelief ekf_correct(const GaussianBelief& prior, double z,
                           const TargetPosition& theta,
                           const SensorParams& p) {
  const GaussianOne g = to_one(prior);
  const MomentsOne o =
      kernels::detail::snr_moments_one(g, theta.x, theta.y, sensor_consts(p));
  if (o.singular) throw JacobianSingular();
  return from_one(kernels::detail::correct_one(g, o, z));
}

void ekf_predict_bank(const GaussianBank& in, double u, const MotionParams& m,
                      GaussianBank& out) {
  out.resize(in.size());
  kernels::active().ekf_predict(in.view(), make_motion_step(u, m), out.view());
}

void snr_moments_bank(const GaussianBank& prior, const std::vector<double>& px,
                      const std::vector<double>& py, const SensorParams& p,
                      MomentsBatch& out) {
  out.resize(prior.size());
  kernels::active().snr_moments(prior.view(), px.data(), py.data(),
                                sensor_consts(p), out.view());
}

std::uint64_t ekf_correct_bank(GaussianBank& bank, const MomentsBatch& m,
                               double z) {
  kernels::active().ekf_correct(bank.view(), m.view(), z);
  // Correction is the only subtraction in the covariance pipeline; screen
  // for lost positive-semidefiniteness here and floor the rare offender.
  std::uint64_t repairs = 0;
  kernels::BankView v = bank.view();
  for (std::size_t k = 0; k < v.n; ++k) {
    if (psd_plausible(v.cxx[k], v.cxy[k], v.cxp[k], v.cyy[k], v.cyp[k],
                      v.cpp[k])) {
      continue;
    }
    Eigen::Matrix3d c;
    c << v.cxx[k], v.cxy[k], v.cxp[k], v.cxy[k], v.cyy[k], v.cyp[k], v.cxp[k],
        v.cyp[k], v.cpp[k];
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(c);
    const Eigen::Vector3d lam = es.eigenvalues().cwiseMax(0.0);
    c = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
    v.cxx[k] = c(0, 0);
    v.cxy[k] = 0.5 * (c(0, 1) + c(1, 0));
    v.cxp[k] = 0.5 * (c(0, 2) + c(2, 0));
    v.cyy[k] = c(1, 1);
    v.cyp[k] = 0.5 * (c(1, 2) + c(2, 1));
    v.cpp[k] = c(2, 2);
    ++repairs;
  }
  return repairs;
}

void weight_update(HybridBelief& hb, const std::vector<MomentsBatch>& moments,
                   const std::vector<double>& z) {
  const std::size_t n = hb.particle_count();
  if (moments.size() != z.size() || moments.size() != hb.agent_count()) {
    throw Error("weight-update: moments/measurement shape mismatch");
  }
  std::vector<double> logw(n);
  for (std::size_t k = 0; k < n; ++k) logw[k] = std::log(hb.weights[k]);
  for (std::size_t i = 0; i < moments.size(); ++i) {
    if (moments[i].size() != n) {
      throw Error("weight-update: moments/particle shape mismatch");
    }
    kernels::active().loglike_accum(moments[i].view(), z[i], logw.data());
  }
  double lmax = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    if (logw[k] > lmax) lmax = logw[k];
  }
  if (!(lmax > -std::numeric_limits<double>::infinity())) {
    throw WeightCollapse();
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    hb.weights[k] = std::exp(logw[k] - lmax);
    sum += hb.weights[k];
  }
  if (!(sum > 0.0)) throw WeightCollapse();
  for (double& w : hb.weights) w /= sum;
}

double effective_sample_size(const std::vector<double>& weights) {
  double s = 0.0;
  for (const double w : weights) s += w * w;
  return 1.0 / s;
}

HybridBelief low_variance_resample(const HybridBelief& hb,
                                   double comb_offset) {
  const std::size_t n = hb.particle_count();
  const double step = 1.0 / static_cast<double>(n);
  if (!(comb_offset >= 0.0 && comb_offset < step)) {
    throw Error("resample: comb offset outside [0, 1/n_p)");
  }
  std::vector<std::uint32_t> idx(n);
  // Comb positions advance by iterated addition so that exactly-uniform
  // weights with offset 0 select the identity permutation, equalities and
  // all: both sides of the comparison then walk the same partial sums.
  double u = comb_offset;
  double c = hb.weights[0];
  std::size_t i = 0;
  for (std::size_t m = 0; m < n; ++m) {
    while (u >= c && i + 1 < n) {
      ++i;
      c += hb.weights[i];
    }
    idx[m] = static_cast<std::uint32_t>(i);
    u += step;
  }

  HybridBelief out;
  out.px.resize(n);
  out.py.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    out.px[m] = hb.px[idx[m]];
    out.py[m] = hb.py[idx[m]];
  }
  out.weights.assign(n, step);
  out.banks.resize(hb.banks.size());
  for (std::size_t a = 0; a < hb.banks.size(); ++a) {
    out.banks[a].gather_from(hb.banks[a], idx);
  }
  out.psd_repairs = hb.psd_repairs;
  return out;
}

TargetPosition target_mmse_estimate(const HybridBelief& hb) {
  double ex = 0.0;
  double ey = 0.0;
  for (std::size_t k = 0; k < hb.particle_count(); ++k) {
    ex += hb.weights[k] * hb.px[k];
    ey += hb.weights[k] * hb.py[k];
  }
  return {ex, ey};
}

GaussianBelief agent_marginal_estimate(const HybridBelief& hb,
                                       std::size_t agent) {
  const kernels::ConstBankView v = hb.banks[agent].view();
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  double exx = 0.0, exy = 0.0, exp_ = 0.0, eyy = 0.0, eyp = 0.0, epp = 0.0;
  for (std::size_t k = 0; k < v.n; ++k) {
    const double w = hb.weights[k];
    m0 += w * v.mx[k];
    m1 += w * v.my[k];
    m2 += w * v.mpsi[k];
    exx += w * (v.cxx[k] + v.mx[k] * v.mx[k]);
    exy += w * (v.cxy[k] + v.mx[k] * v.my[k]);
    exp_ += w * (v.cxp[k] + v.mx[k] * v.mpsi[k]);
    eyy += w * (v.cyy[k] + v.my[k] * v.my[k]);
    eyp += w * (v.cyp[k] + v.my[k] * v.mpsi[k]);
    epp += w * (v.cpp[k] + v.mpsi[k] * v.mpsi[k]);
  }
  GaussianBelief out;
  out.mean << m0, m1, m2;
  out.cov << exx - m0 * m0, exy - m0 * m1, exp_ - m0 * m2, exy - m0 * m1,
      eyy - m1 * m1, eyp - m1 * m2, exp_ - m0 * m2, eyp - m1 * m2,
      epp - m2 * m2;
  return out;
}

}  // namespace miseeker
