#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "miseeker/world.hpp"

// The noise-level sweep: paired trials of both algorithms per (level, trial)
// with common random numbers, aggregated into final-step quartile summaries
// and per-step time series.

namespace miseeker {

struct SweepConfig {
  // Reference process-noise covariance scaled by each level multiplier.
  Eigen::Matrix3d base_cov =
      (Eigen::Vector3d(0.05 * 0.05, 0.05 * 0.05, 0.0436 * 0.0436))
          .asDiagonal();
  std::vector<double> levels = {0.0, 0.5, 1.0, 2.0, 4.0, 6.0};
  std::size_t trials = 30;
  EpisodeConfig episode;  // template; per-task noise/algorithm is overridden
  bool run_proposed = true;
  bool run_pf_only = true;

  void validate() const;  // throws ConfigError
};

/// One episode's distilled result within a sweep.
struct TrialOutcome {
  std::size_t level_idx = 0;
  std::size_t trial = 0;
  Algorithm algorithm = Algorithm::kProposed;
  std::uint64_t trial_id = 0;
  bool halted = false;
  std::string halt_reason;
  std::uint64_t noise_digest = 0;
  std::uint64_t psd_repairs = 0;
  // Per-step error traces; shorter than the horizon only when halted.
  std::vector<double> target_errors;
  std::vector<double> agent_errors;
};

struct SweepResult {
  std::vector<TrialOutcome> outcomes;  // fixed order: level, trial, algorithm
  std::size_t halted_count = 0;
  bool pairing_ok = true;  // noise digests matched across algorithms
};

struct SummaryRow {
  double level = 0.0;
  Algorithm algorithm = Algorithm::kProposed;
  std::string metric;  // "target" | "agent"
  double q1 = 0.0;
  double mean = 0.0;
  double q3 = 0.0;
  std::size_t valid_trials = 0;
  std::size_t halted_trials = 0;
};

struct TimeSeriesRow {
  double level = 0.0;
  Algorithm algorithm = Algorithm::kProposed;
  std::string metric;
  std::int64_t time_step = 0;
  double mean = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

/// Runs trials × levels × algorithms episodes on a worker pool. Results are
/// stored by task index, so the outcome order (and every downstream file)
/// is independent of scheduling. workers = 0 means one per hardware thread.
SweepResult run_sweep(const SweepConfig& sc, std::size_t workers);

/// Final-step (target, agent) errors of one completed episode; empty when
/// the episode halted before the horizon.
std::optional<std::pair<double, double>> error_metrics(
    const EpisodeResult& er, std::size_t horizon);

/// Mean and interpolated quartiles (linear interpolation between closest
/// ranks) of one error sample. Throws on empty input.
SummaryRow quartile_summary(const std::vector<double>& errors, double level,
                            Algorithm algorithm, const std::string& metric);

/// All summary rows of a sweep in fixed order: level (input order), then
/// algorithm (pf-only before proposed), then metric (target before agent).
std::vector<SummaryRow> summarize_sweep(const SweepConfig& sc,
                                        const SweepResult& sr);

/// Per-step mean/quartiles over completed trials, ordered like the summary
/// with time_step innermost.
std::vector<TimeSeriesRow> timeseries_summary(const SweepConfig& sc,
                                              const SweepResult& sr);

// External file formats. Writers are deterministic byte-for-byte.
void write_summary_csv(const std::string& path,
                       const std::vector<SummaryRow>& rows);
void write_timeseries_csv(const std::string& path,
                          const std::vector<TimeSeriesRow>& rows);

}  // namespace miseeker
