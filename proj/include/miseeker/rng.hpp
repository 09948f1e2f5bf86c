#pragma once

#include <cstdint>
#include <cstring>

#include "miseeker/math_util.hpp"

// Counter-based random numbers built on the splitmix64 finalizer. Draws are
// addressed, not sequenced: value(ctr) is a pure function of (stream key,
// ctr), so the same (seed, trial, step, agent) always yields the same noise
// no matter what the planner decided in between. That is what makes paired
// runs of different algorithms see literally identical disturbances.

namespace miseeker::rng {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

inline std::uint64_t splitmix_fin(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

struct Stream {
  std::uint64_t key = 0;

  std::uint64_t bits(std::uint64_t ctr) const {
    return splitmix_fin(key + kGolden * (ctr + 1));
  }

  /// Uniform double in [0, 1), 53 mantissa bits.
  double uniform01(std::uint64_t ctr) const {
    return static_cast<double>(bits(ctr) >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller on the uniforms at counters 2*idx and
  /// 2*idx + 1. Stateless: draw idx never depends on other draws.
  double normal(std::uint64_t idx) const {
    const double u1 = uniform01(2 * idx);      // 1 - u1 is in (0, 1]
    const double u2 = uniform01(2 * idx + 1);
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    return r * std::cos(kTwoPi * u2);
  }
};

enum class StreamTag : std::uint64_t {
  kInit = 1,         // initial belief perturbations and particle spread
  kMotion = 2,       // true process noise
  kMeasurement = 3,  // sensor noise
  kResample = 4,     // systematic-resampler comb offsets
  kPlanner = 5,      // planner tie-breaking draws
};

inline Stream derive_stream(std::uint64_t seed, std::uint64_t trial_id,
                            StreamTag tag) {
  const std::uint64_t k0 = splitmix_fin(seed);
  const std::uint64_t k1 = splitmix_fin(k0 + kGolden * (trial_id + 1));
  return Stream{splitmix_fin(k1 + kGolden * static_cast<std::uint64_t>(tag))};
}

/// All streams one trial consumes.
struct TrialStreams {
  Stream init;
  Stream motion;
  Stream measurement;
  Stream resample;
  Stream planner;

  static TrialStreams derive(std::uint64_t seed, std::uint64_t trial_id) {
    return {derive_stream(seed, trial_id, StreamTag::kInit),
            derive_stream(seed, trial_id, StreamTag::kMotion),
            derive_stream(seed, trial_id, StreamTag::kMeasurement),
            derive_stream(seed, trial_id, StreamTag::kResample),
            derive_stream(seed, trial_id, StreamTag::kPlanner)};
  }
};

/// Order-sensitive fold over consumed disturbance draws. Two episodes that
/// consumed identical noise (the pairing contract) produce identical digests.
struct NoiseDigest {
  std::uint64_t state = 0x6d1bcd81f0b6e2c5ull;

  void fold(double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, sizeof u);
    state = splitmix_fin((state ^ u) + kGolden);
  }
};

}  // namespace miseeker::rng
