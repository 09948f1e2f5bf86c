#include "miseeker/world.hpp"

#include <cmath>
#include <utility>

namespace miseeker {
namespace {

/// Probability of keeping the previous tie draw at each step. Once the
/// target is localized the objective is flat across the whole action grid,
/// so the planner is indifferent; lazy re-randomization turns that
/// indifference into smooth arcs (mean hold 1 / (1 - kTieHold) steps)
/// instead of per-step chattering or a standing orbit.
constexpr double kTieHold = 0.9;

/// Fresh tie draws are arcsine-weighted toward the ends of the tie set:
/// an indifferent aircraft loiters in banked arcs rather than running
/// straight off station, so the extreme bank angles carry most of the
/// mass while every tied action stays reachable.
double loiter_draw(double u) {
  const double v = 0.5 * (1.0 - std::cos(kPi * u));
  return std::min(v, 0x1.fffffffffffffp-1);
}

/// Symmetric PSD square root via eigendecomposition, eigenvalues floored
/// at zero (a noise covariance with -1e-18 dust must not produce NaNs).
Eigen::Matrix3d symmetric_sqrt(const Eigen::Matrix3d& c) {
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(c);
  const Eigen::Vector3d lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

std::vector<AgentState> default_topology(std::size_t n_v, const Region& r) {
  // Agents on the circle inscribed in the region, first one at the bottom,
  // counterclockwise, headings facing the region center. For four agents in
  // a square region this is the midpoint of each edge.
  const double cx = 0.5 * (r.x_min + r.x_max);
  const double cy = 0.5 * (r.y_min + r.y_max);
  const double radius = 0.5 * std::min(r.width(), r.height());
  std::vector<AgentState> out(n_v);
  for (std::size_t j = 0; j < n_v; ++j) {
    const double phi =
        -0.5 * kPi + kTwoPi * static_cast<double>(j) / static_cast<double>(n_v);
    const double x = cx + radius * std::cos(phi);
    const double y = cy + radius * std::sin(phi);
    out[j] = {x, y, wrap_angle(std::atan2(cy - y, cx - x))};
  }
  return out;
}

}  // namespace

std::string algorithm_name(Algorithm a) {
  return a == Algorithm::kProposed ? "proposed" : "pf-only";
}

Algorithm algorithm_from_name(const std::string& s) {
  if (s == "proposed") return Algorithm::kProposed;
  if (s == "pf-only") return Algorithm::kPfOnly;
  throw ConfigError("unknown algorithm '" + s +
                    "' (expected proposed or pf-only)");
}

void EpisodeConfig::resolve() {
  if (initial_agents.empty()) initial_agents = default_topology(n_v, region);
  if (grid.values.empty()) {
    const SearchMode mode = n_v <= 3 ? SearchMode::kExhaustiveJoint
                                     : SearchMode::kSequentialGreedy;
    grid = ActionGrid::symmetric(5, motion.u_max, mode);
  }
  if (algorithm == Algorithm::kPfOnly) motion.q_cov.setZero();
}

void EpisodeConfig::validate() const {
  if (n_v < 1) throw ConfigError("episode: need at least one agent");
  if (!(region.width() > 0.0) || !(region.height() > 0.0)) {
    throw ConfigError("episode: region extent must be positive");
  }
  if (initial_agents.size() != n_v) {
    throw ConfigError("episode: initial agent count does not match n_v");
  }
  if (n_p < 1) throw ConfigError("episode: need at least one particle");
  if (!motion.valid()) throw ConfigError("episode: invalid motion params");
  if (!sensor.valid()) throw ConfigError("episode: invalid sensor params");
  if (!true_noise_cov.isApprox(true_noise_cov.transpose(), 1e-12)) {
    throw ConfigError("episode: true noise covariance must be symmetric");
  }
  if (algorithm == Algorithm::kPfOnly && !motion.q_cov.isZero(0.0)) {
    throw ConfigError("episode: pf-only requires zero assumed process noise");
  }
  grid.validate(motion.u_max);
}

EpisodeConfig baseline_config(EpisodeConfig cfg) {
  cfg.algorithm = Algorithm::kPfOnly;
  cfg.motion.q_cov.setZero();
  return cfg;
}

rng::TrialStreams noise_streams(std::uint64_t seed, std::uint64_t trial_id) {
  return rng::TrialStreams::derive(seed, trial_id);
}

std::pair<WorldState, HybridBelief> init_episode(const EpisodeConfig& cfg,
                                                 rng::NoiseDigest* digest) {
  const rng::Stream init = noise_streams(cfg.seed, cfg.trial_id).init;

  WorldState w;
  w.true_agents = cfg.initial_agents;
  w.time_step = 0;
  // Counters 0 and 1 belong to the target draw whether or not it is used,
  // so a fixed-target run stays aligned with the uniform-draw layout.
  const double ux = init.uniform01(0);
  const double uy = init.uniform01(1);
  if (cfg.fixed_target) {
    w.true_target = *cfg.fixed_target;
  } else {
    w.true_target = {cfg.region.x_min + ux * cfg.region.width(),
                     cfg.region.y_min + uy * cfg.region.height()};
  }
  if (digest) {
    digest->fold(ux);
    digest->fold(uy);
  }

  HybridBelief hb;
  hb.px.resize(cfg.n_p);
  hb.py.resize(cfg.n_p);
  for (std::size_t k = 0; k < cfg.n_p; ++k) {
    const double px = init.uniform01(2 + 2 * k);
    const double py = init.uniform01(3 + 2 * k);
    hb.px[k] = cfg.region.x_min + px * cfg.region.width();
    hb.py[k] = cfg.region.y_min + py * cfg.region.height();
    if (digest) {
      digest->fold(px);
      digest->fold(py);
    }
  }
  hb.weights.assign(cfg.n_p, 1.0 / static_cast<double>(cfg.n_p));
  hb.banks.resize(cfg.n_v);
  for (std::size_t a = 0; a < cfg.n_v; ++a) {
    hb.banks[a].resize(cfg.n_p);
    GaussianBelief b;
    b.mean << cfg.initial_agents[a].x, cfg.initial_agents[a].y,
        cfg.initial_agents[a].psi;
    b.cov.setZero();
    hb.banks[a].fill(b);
  }
  return {std::move(w), std::move(hb)};
}

WorldState step_world(const WorldState& w, const JointAction& u,
                      const MotionParams& m,
                      const Eigen::Matrix3d& true_noise_cov,
                      const rng::Stream& motion, rng::NoiseDigest* digest) {
  const std::size_t n_v = w.true_agents.size();
  if (u.banks.size() != n_v) {
    throw Error("step: action/agent count mismatch");
  }
  const Eigen::Matrix3d s = symmetric_sqrt(true_noise_cov);
  WorldState out;
  out.true_target = w.true_target;
  out.time_step = w.time_step + 1;
  out.true_agents.resize(n_v);
  const std::uint64_t step_idx = static_cast<std::uint64_t>(w.time_step);
  for (std::size_t a = 0; a < n_v; ++a) {
    const AgentState det = fixedwing_step(w.true_agents[a], u.banks[a], m);
    const std::uint64_t base = (step_idx * n_v + a) * 3;
    Eigen::Vector3d xi;
    xi << motion.normal(base), motion.normal(base + 1), motion.normal(base + 2);
    if (digest) {
      digest->fold(xi(0));
      digest->fold(xi(1));
      digest->fold(xi(2));
    }
    const Eigen::Vector3d nu = s * xi;
    out.true_agents[a] = {det.x + nu(0), det.y + nu(1),
                          wrap_angle(det.psi + nu(2))};
  }
  return out;
}

std::vector<double> observe(const WorldState& w, const SensorParams& p,
                            const rng::Stream& measurement,
                            rng::NoiseDigest* digest) {
  const std::size_t n_v = w.true_agents.size();
  const double sigma = std::sqrt(p.r_var);
  std::vector<double> z(n_v);
  const std::uint64_t step_idx = static_cast<std::uint64_t>(w.time_step - 1);
  for (std::size_t a = 0; a < n_v; ++a) {
    const double xi = measurement.normal(step_idx * n_v + a);
    if (digest) digest->fold(xi);
    z[a] = snr_measure(w.true_agents[a], w.true_target, p) + sigma * xi;
  }
  return z;
}

EpisodeResult run_episode(const EpisodeConfig& cfg) {
  cfg.validate();
  const rng::TrialStreams streams = noise_streams(cfg.seed, cfg.trial_id);
  rng::NoiseDigest digest;

  auto [world, hb] = init_episode(cfg, &digest);

  EpisodeResult result;
  result.records.reserve(cfg.horizon);
  const double resample_threshold = 0.5 * static_cast<double>(cfg.n_p);

  // Tie draws are keyed by (seed, trial, step) only, so paired runs break
  // flat-objective ties identically and the comparison stays
  // common-random-number matched even after the target collapses.
  double tie_u = 0.0;
  for (std::size_t t = 1; t <= cfg.horizon; ++t) {
    StepRecord rec;
    rec.time_step = static_cast<std::int64_t>(t);
    const std::uint64_t tc = 2 * static_cast<std::uint64_t>(t - 1);
    if (t == 1 || streams.planner.uniform01(tc) >= kTieHold) {
      tie_u = loiter_draw(streams.planner.uniform01(tc + 1));
    }
    try {
      PlanOutcome outcome =
          plan_step(hb, cfg.grid, cfg.motion, cfg.sensor, tie_u);

      world = step_world(world, outcome.best, cfg.motion, cfg.true_noise_cov,
                         streams.motion, &digest);
      const std::vector<double> z =
          observe(world, cfg.sensor, streams.measurement, &digest);

      // The priors and measurement moments for the executed action were
      // already computed during planning; the filter reuses them.
      for (std::size_t a = 0; a < cfg.n_v; ++a) {
        hb.banks[a] = std::move(outcome.cached.priors[a]);
      }
      weight_update(hb, outcome.cached.moments, z);
      for (std::size_t a = 0; a < cfg.n_v; ++a) {
        hb.psd_repairs +=
            ekf_correct_bank(hb.banks[a], outcome.cached.moments[a], z[a]);
      }

      rec.action = outcome.best.banks;
      rec.objective = outcome.objective;
      rec.true_agents = world.true_agents;
      rec.measurements = z;
      rec.target_estimate = target_mmse_estimate(hb);
      rec.agent_estimates.resize(cfg.n_v);
      double agent_err_sum = 0.0;
      for (std::size_t a = 0; a < cfg.n_v; ++a) {
        rec.agent_estimates[a] = agent_marginal_estimate(hb, a).mean;
        agent_err_sum +=
            std::hypot(rec.agent_estimates[a](0) - world.true_agents[a].x,
                       rec.agent_estimates[a](1) - world.true_agents[a].y);
      }
      rec.agent_error = agent_err_sum / static_cast<double>(cfg.n_v);
      rec.target_error = std::hypot(rec.target_estimate.x - world.true_target.x,
                                    rec.target_estimate.y - world.true_target.y);
      rec.n_eff = effective_sample_size(hb.weights);

      if (rec.n_eff < resample_threshold) {
        const double offset = streams.resample.uniform01(t) /
                              static_cast<double>(cfg.n_p);
        hb = low_variance_resample(hb, offset);
        rec.resampled = true;
      }
    } catch (const WeightCollapse&) {
      result.halted = true;
      result.halt_step = static_cast<std::int64_t>(t);
      result.halt_reason = "weight-collapse";
      break;
    } catch (const PlannerStarved&) {
      result.halted = true;
      result.halt_step = static_cast<std::int64_t>(t);
      result.halt_reason = "planner-starved";
      break;
    }
    result.records.push_back(std::move(rec));
  }

  result.noise_digest = digest.state;
  result.psd_repairs = hb.psd_repairs;
  return result;
}

}  // namespace miseeker
