#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "miseeker/belief.hpp"

// Myopic mutual-information planning: each candidate joint bank-angle command
// is scored by the information the next joint measurement is expected to
// carry about the target, with the measurement mixture moment-matched by a
// Gaussian. The PF-only baseline is this same planner run with zero assumed
// process noise, which collapses every predicted measurement variance to R.

namespace miseeker {

enum class SearchMode {
  kExhaustiveJoint,    // argmax over the Cartesian product of agent grids
  kSequentialGreedy,   // agents optimized one at a time in index order
};

/// One bank-angle command per agent.
struct JointAction {
  std::vector<double> banks;
};

/// Discrete candidate bank angles, shared by all agents.
struct ActionGrid {
  std::vector<double> values;  // sorted ascending; odd count; symmetric
  SearchMode mode = SearchMode::kExhaustiveJoint;

  /// Evenly spaced symmetric grid: {-u_max, ..., 0, ..., u_max}.
  static ActionGrid symmetric(std::size_t levels, double u_max,
                              SearchMode mode);

  /// Throws ConfigError unless values are odd-count (>= 3), strictly sorted,
  /// exactly symmetric about a contained 0, and spanning [-u_max, u_max].
  void validate(double u_max) const;

  std::size_t zero_index() const;
};

/// Moment-matched Gaussian of the joint predicted-measurement mixture.
struct MixtureMoments {
  Eigen::VectorXd mean;  // n_v
  Eigen::MatrixXd cov;   // n_v x n_v, symmetric
};

/// Hypothetical one-step-ahead quantities for one joint action: per-agent
/// prior banks and per-(agent, particle) measurement moments.
struct CandidateMoments {
  std::vector<GaussianBank> priors;
  std::vector<MomentsBatch> moments;

  bool any_singular() const;
};

struct PlanOutcome {
  JointAction best;
  double objective = 0.0;
  CandidateMoments cached;  // reused by the filter for the executed action
};

/// Chains the EKF time update and the measurement-moment map for every
/// (agent, particle) pair under one joint action. Purely hypothetical; the
/// belief is untouched. Zero-range pairs are flagged in the result (they
/// poison the candidate at scoring time) rather than thrown.
CandidateMoments candidate_moments(const HybridBelief& hb,
                                   const JointAction& u,
                                   const MotionParams& m,
                                   const SensorParams& p);

/// Gaussian moment matching of the weighted measurement mixture:
/// mean_i = sum_k w_k mu_ik; diagonal via sum_k w_k (var_ik + mu_ik^2) -
/// mean_i^2; off-diagonals centered.
MixtureMoments mixture_moments(const std::vector<double>& weights,
                               const std::vector<MomentsBatch>& moments);

/// Reduced information objective log|cov| - sum_k w_k sum_i log var_ik.
/// Equals twice the difference of the moment-matched entropy of z and the
/// expected conditional entropy given the particle, constants cancelling.
/// Throws MomentDegenerate when the mixture covariance is not positive
/// definite.
double mi_objective(const std::vector<double>& weights,
                    const std::vector<MomentsBatch>& moments,
                    const MixtureMoments& mm);

/// Relative margin below the best score within which candidates count as
/// tied. Once the particle cloud has collapsed, every action scores the
/// same up to rounding dust (~1e-13); without the margin the argmax would
/// resolve on that dust, so which action wins would hinge on the last ulp
/// of the score computation.
inline constexpr double kScoreMargin = 1e-9;

/// Scores candidates per the grid's search mode and returns a maximizer.
/// All candidates within kScoreMargin of the best form a tie set, and
/// tie_u in [0, 1) selects one by enumeration rank (ascending lexicographic
/// order, agent 0 most significant; the greedy mode applies the same rule
/// per stage). The default tie_u = 0 keeps the first; the episode loop
/// passes a per-step draw instead, so that a flat objective -- the normal
/// state of affairs once the target is localized -- yields an arbitrary
/// but reproducible action rather than a standing orbit. Candidates with
/// singular pairs or degenerate mixture covariances score -inf; if nothing
/// scores finite, throws PlannerStarved.
PlanOutcome plan_step(const HybridBelief& hb, const ActionGrid& grid,
                      const MotionParams& m, const SensorParams& p,
                      double tie_u = 0.0);

}  // namespace miseeker
