#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Built-in numerical diagnostics, runnable in any deployment without the
// test tree: analytic Jacobians against finite differences, moment matching
// against direct mixture sampling, the resampler against its exactness and
// unbiasedness contracts, and the information objective against its entropy
// form. Fault injection exists so the harness can prove the checks can fail.

namespace miseeker {

enum class Fault {
  kNone,
  kJacobianSign,  // flips the heading column of the sensor Jacobian
};

/// "" -> kNone, "jacobian-sign" -> kJacobianSign; otherwise ConfigError.
Fault fault_from_name(const std::string& s);

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;  // one-line diagnostic: worst error vs its allowance
};

/// Runs the diagnostic suites in fixed order: jacobian, moments, resampler,
/// objective. A non-empty filter selects one suite by name (ConfigError on
/// an unknown name). The seed varies the sampled instances, not the
/// tolerances.
std::vector<SuiteResult> run_selfchecks(const std::string& filter, Fault fault,
                                        std::uint64_t seed);

}  // namespace miseeker
