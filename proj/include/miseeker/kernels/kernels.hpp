#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "miseeker/kernels/detail.hpp"

// Batched per-particle kernels over structure-of-arrays banks. Two backends:
// a scalar reference and an AVX2 variant selected at run time. Both produce
// bit-identical outputs: the vector code mirrors the scalar arithmetic lane
// by lane and routes transcendentals through the same libm calls, and every
// sum over particles lives outside the backends in one ordered reduction.

namespace miseeker::kernels {

/// Mutable SoA view of one agent's bank of conditional Gaussians.
struct BankView {
  double* mx;
  double* my;
  double* mpsi;
  double *cxx, *cxy, *cxp, *cyy, *cyp, *cpp;
  std::size_t n;
};

struct ConstBankView {
  const double* mx;
  const double* my;
  const double* mpsi;
  const double *cxx, *cxy, *cxp, *cyy, *cyp, *cpp;
  std::size_t n;
};

/// Mutable SoA view of per-particle predicted-measurement moments.
struct MomentsView {
  double* mu;
  double* var;
  double *hx, *hy, *hp;
  std::uint8_t* singular;
  std::size_t n;
};

struct ConstMomentsView {
  const double* mu;
  const double* var;
  const double *hx, *hy, *hp;
  const std::uint8_t* singular;
  std::size_t n;
};

struct Backend {
  const char* name;
  /// out[k] = EKF time update of in[k] under one shared control.
  void (*ekf_predict)(ConstBankView in, const detail::MotionStep& ms,
                      BankView out);
  /// out[k] = predicted measurement moments of (prior[k], particle k).
  void (*snr_moments)(ConstBankView prior, const double* tx, const double* ty,
                      const detail::SensorConsts& sc, MomentsView out);
  /// bank[k] = Kalman correction of bank[k] with moments[k] and shared z.
  void (*ekf_correct)(BankView bank, ConstMomentsView m, double z);
  /// logw[k] += log N(z; mu[k], var[k]).
  void (*loglike_accum)(ConstMomentsView m, double z, double* logw);
};

const Backend& scalar_backend();

/// Currently selected backend. Defaults to the widest one the CPU supports;
/// the MI_SEEKER_KERNELS environment variable ("scalar" or "avx2") overrides.
const Backend& active();

/// Selects a backend by name. Returns false if it is not available here.
bool set_active(std::string_view name);

std::vector<std::string> available();

}  // namespace miseeker::kernels
