#pragma once

#include <string>

#include "json.hpp"

#include "miseeker/montecarlo.hpp"

// JSON configuration for the CLI. Field names carry units (speed_mps,
// psi_rad, ...). Unknown keys are rejected: a typo that silently falls back
// to a default would corrupt an experiment. Precedence is command line over
// file over built-in defaults; the manifest records the resolved snapshot.

namespace miseeker {

struct AppConfig {
  SweepConfig sweep;        // holds the episode template
  double noise_mult = 1.0;  // single-run noise level (sweeps use sweep.levels)
};

/// Built-in defaults, fully resolved.
AppConfig default_config();

/// Parses and resolves a JSON config document over the defaults.
/// Throws ConfigError with a field- or line-anchored message.
AppConfig parse_config(const nlohmann::json& j);

/// Reads, parses, and resolves a config file.
AppConfig load_config_file(const std::string& path);

/// Episode for a one-off run: true and assumed process-noise covariances
/// resolved from noise_mult times the sweep's base covariance (the assumed
/// one stays zero under the pf-only baseline).
EpisodeConfig single_episode(const AppConfig& c);

/// Resolved snapshot of everything an episode/sweep will actually use.
nlohmann::json config_snapshot(const AppConfig& c);

}  // namespace miseeker
