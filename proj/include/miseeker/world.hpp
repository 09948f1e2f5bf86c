#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "miseeker/planner.hpp"
#include "miseeker/rng.hpp"

// Ground-truth world and the per-step episode loop: plan, move the true
// agents under the true process noise, take measurements, update the hybrid
// filter. All randomness is addressed by (seed, trial, step, agent) so the
// proposed planner and the dead-reckoning baseline consume identical noise.

namespace miseeker {

enum class Algorithm {
  kProposed,  // filter assumes the configured process noise
  kPfOnly,    // filter assumes zero process noise (dead-reckoned agents)
};

std::string algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& s);  // throws ConfigError

/// Axis-aligned search region; bounds the target prior and the particle
/// spread, not the flight volume.
struct Region {
  double x_min = 0.0;
  double x_max = 40.0;
  double y_min = 0.0;
  double y_max = 40.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
};

struct WorldState {
  std::vector<AgentState> true_agents;
  TargetPosition true_target;
  std::int64_t time_step = 0;
};

struct EpisodeConfig {
  std::size_t n_v = 4;
  Region region;
  std::vector<AgentState> initial_agents;  // empty: default ring topology
  Eigen::Matrix3d true_noise_cov = Eigen::Matrix3d::Zero();
  MotionParams motion;  // motion.q_cov is the noise the filter assumes
  SensorParams sensor;
  std::size_t n_p = 500;
  ActionGrid grid;  // empty values: default 5-level grid, mode by n_v
  std::size_t horizon = 100;
  std::uint64_t seed = 0;
  std::uint64_t trial_id = 0;
  Algorithm algorithm = Algorithm::kProposed;
  std::optional<TargetPosition> fixed_target;  // unset: uniform draw in region

  /// Fills defaulted fields (initial agents, action grid) and enforces the
  /// baseline contract: pf-only zeroes the assumed process noise.
  void resolve();

  /// Throws ConfigError on any inconsistency. Expects resolve() ran first.
  void validate() const;
};

/// The baseline configuration is the same pipeline with the filter's process
/// noise assumed zero; there is no separate code path.
EpisodeConfig baseline_config(EpisodeConfig cfg);

struct StepRecord {
  std::int64_t time_step = 0;
  std::vector<double> action;            // chosen bank angle per agent
  std::vector<AgentState> true_agents;
  std::vector<double> measurements;
  TargetPosition target_estimate;
  std::vector<Eigen::Vector3d> agent_estimates;  // marginal means
  double target_error = 0.0;  // m
  double agent_error = 0.0;   // m, mean over agents of position error
  double n_eff = 0.0;
  bool resampled = false;
  double objective = 0.0;
};

struct EpisodeResult {
  std::vector<StepRecord> records;
  bool halted = false;
  std::int64_t halt_step = -1;
  std::string halt_reason;
  std::uint64_t noise_digest = 0;  // pairing audit checksum
  std::uint64_t psd_repairs = 0;
};

/// Streams are a function of (seed, trial) only — never of the algorithm —
/// which is the whole paired-comparison contract.
rng::TrialStreams noise_streams(std::uint64_t seed, std::uint64_t trial_id);

/// Draws the true target (unless fixed) and the particle cloud uniformly in
/// the region; every EKF-bank Gaussian starts at the true agent pose with
/// zero covariance. Folds the init draws into digest when given.
std::pair<WorldState, HybridBelief> init_episode(const EpisodeConfig& cfg,
                                                 rng::NoiseDigest* digest);

/// Advances every true agent one fixed-wing step plus process noise drawn
/// from the motion stream at counters addressed by (time_step, agent).
WorldState step_world(const WorldState& w, const JointAction& u,
                      const MotionParams& m,
                      const Eigen::Matrix3d& true_noise_cov,
                      const rng::Stream& motion, rng::NoiseDigest* digest);

/// One noisy scalar measurement per agent, addressed by (time_step, agent).
std::vector<double> observe(const WorldState& w, const SensorParams& p,
                            const rng::Stream& measurement,
                            rng::NoiseDigest* digest);

/// Runs the full episode loop. Weight collapse (and planner starvation)
/// halt the episode with the reason recorded; anything else propagates.
EpisodeResult run_episode(const EpisodeConfig& cfg);

}  // namespace miseeker
