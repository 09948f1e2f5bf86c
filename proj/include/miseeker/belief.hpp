#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "miseeker/kernels/kernels.hpp"
#include "miseeker/models.hpp"

// The hybrid belief: a particle cloud over the target position where every
// particle k carries one conditional Gaussian per agent (the EKF bank). Banks
// are stored as structure-of-arrays so the per-particle filter arithmetic can
// run through the batched kernels.

namespace miseeker {

struct GaussianBelief {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();   // x, y, psi
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
};

/// Predicted scalar-measurement moments for one (agent, particle) pair.
struct MeasurementMoments {
  double mean = 0.0;
  double var = 0.0;  // >= r_var by construction
};

/// One agent's bank of per-particle conditional Gaussians, SoA layout.
/// Covariances keep only the six unique entries, so symmetry is structural.
class GaussianBank {
 public:
  GaussianBank() = default;
  explicit GaussianBank(std::size_t n) { resize(n); }

  void resize(std::size_t n);
  std::size_t size() const { return mx_.size(); }

  GaussianBelief get(std::size_t k) const;
  void set(std::size_t k, const GaussianBelief& b);
  /// Sets every entry to the same Gaussian.
  void fill(const GaussianBelief& b);

  /// Deep-copies rows of src selected by idx (the resampling gather).
  void gather_from(const GaussianBank& src,
                   const std::vector<std::uint32_t>& idx);

  kernels::BankView view();
  kernels::ConstBankView view() const;

 private:
  std::vector<double> mx_, my_, mpsi_;
  std::vector<double> cxx_, cxy_, cxp_, cyy_, cyp_, cpp_;
};

/// Per-particle measurement moments for one agent, SoA layout.
struct MomentsBatch {
  std::vector<double> mu, var, hx, hy, hp;
  std::vector<std::uint8_t> singular;

  void resize(std::size_t n);
  std::size_t size() const { return mu.size(); }
  bool any_singular() const;

  kernels::MomentsView view();
  kernels::ConstMomentsView view() const;

  MeasurementMoments get(std::size_t k) const { return {mu[k], var[k]}; }
};

struct HybridBelief {
  std::vector<double> px, py;        // particle target positions
  std::vector<double> weights;       // nonnegative, summing to 1
  std::vector<GaussianBank> banks;   // one bank per agent
  std::uint64_t psd_repairs = 0;     // covariance floor events this episode

  std::size_t particle_count() const { return weights.size(); }
  std::size_t agent_count() const { return banks.size(); }
};

// ---- single-Gaussian filter operations ----

/// EKF time update: mean through the fixed-wing step, covariance through
/// F Sigma F^T + q_cov. Throws ControlOutOfBounds if |u| > u_max.
GaussianBelief ekf_predict(const GaussianBelief& b, double u,
                           const MotionParams& m);

/// Moments of the predicted measurement for a prior belief and one target
/// hypothesis: mean = h(mu, theta), var = H Sigma H^T + r_var.
/// Throws JacobianSingular at zero range.
MeasurementMoments predicted_measurement_moments(const GaussianBelief& prior,
                                                 const TargetPosition& theta,
                                                 const SensorParams& p);

/// Kalman correction of the prior with one scalar measurement, linearized at
/// the prior mean. Throws JacobianSingular at zero range. A zero-covariance
/// prior passes through unchanged (gain is exactly zero).
GaussianBelief ekf_correct(const GaussianBelief& prior, double z,
                           const TargetPosition& theta, const SensorParams& p);

// ---- batched bank operations (the filter/planner hot path) ----

/// Applies the EKF time update to every particle's Gaussian for one agent.
/// in and out may be the same object only if their storage is identical size.
void ekf_predict_bank(const GaussianBank& in, double u, const MotionParams& m,
                      GaussianBank& out);

/// Predicted measurement moments of every (prior Gaussian, particle) pair
/// for one agent. Zero-range pairs are flagged singular instead of throwing:
/// h stays defined (alpha/beta), the Jacobian row is zeroed, var = r_var.
void snr_moments_bank(const GaussianBank& prior, const std::vector<double>& px,
                      const std::vector<double>& py, const SensorParams& p,
                      MomentsBatch& out);

/// Corrects every Gaussian in the bank with the shared measurement z using
/// the per-particle moments computed from the same bank. Returns the number
/// of covariance repairs (negative eigenvalues floored at zero) applied.
std::uint64_t ekf_correct_bank(GaussianBank& bank, const MomentsBatch& m,
                               double z);

// ---- particle-side operations ----

/// Bayes weight update: w_k <- w_k * prod_i N(z_i; mu_ik, var_ik), done in
/// log domain with max subtraction, then normalized in place.
/// Throws WeightCollapse when every particle's likelihood underflows.
void weight_update(HybridBelief& hb, const std::vector<MomentsBatch>& moments,
                   const std::vector<double>& z);

/// N_eff = 1 / sum(w^2); in [1, n_p] up to rounding.
double effective_sample_size(const std::vector<double>& weights);

/// Systematic (low-variance) resampling with comb offset in [0, 1/n_p).
/// Survivor particles keep their positions; each survivor's whole EKF-bank
/// column is deep-copied; weights reset to exactly 1/n_p.
HybridBelief low_variance_resample(const HybridBelief& hb, double comb_offset);

/// Weighted particle mean (the MMSE point estimate of the target).
TargetPosition target_mmse_estimate(const HybridBelief& hb);

/// Moment-matched Gaussian marginal of agent i over the particle mixture:
/// mean = sum_k w_k mu_k, cov = sum_k w_k (Sigma_k + mu_k mu_k^T) - mean mean^T.
GaussianBelief agent_marginal_estimate(const HybridBelief& hb,
                                       std::size_t agent);

}  // namespace miseeker
