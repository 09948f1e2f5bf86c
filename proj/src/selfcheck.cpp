#include "miseeker/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "miseeker/belief.hpp"
#include "miseeker/errors.hpp"
#include "miseeker/math_util.hpp"
#include "miseeker/planner.hpp"
#include "miseeker/rng.hpp"

namespace miseeker {
namespace {

template <typename... Args>
std::string strf(const char* f, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return std::string(buf);
}

// ---- jacobian: analytic derivatives vs central finite differences ----
//
// Instances keep the relative bearing at least 0.19 rad away from the +-pi
// seam and the range at least 5 m, where both maps are smooth; a finite
// difference straddling either seam measures the jump, not the derivative.

SuiteResult check_jacobian(Fault fault, std::uint64_t seed) {
  const rng::Stream s{rng::splitmix_fin(seed + 101)};
  std::uint64_t c = 0;
  auto u01 = [&] { return s.uniform01(c++); };
  auto sym = [&](double lim) { return (2.0 * u01() - 1.0) * lim; };

  const SensorParams p;
  const MotionParams m;
  const double h = 1e-5;
  const double tol = 1e-5;
  double max_rel = 0.0;

  auto track = [&](double analytic, double fd) {
    const double rel =
        std::abs(analytic - fd) / std::max(1.0, std::abs(analytic));
    max_rel = std::max(max_rel, rel);
  };

  for (int it = 0; it < 1000; ++it) {
    AgentState a{40.0 * u01(), 40.0 * u01(), sym(kPi - 0.5)};
    const double rel_bearing = sym(kPi - 0.2);
    const double dist = 5.0 + 25.0 * u01();
    const double b = a.psi + rel_bearing;
    const TargetPosition t{a.x + dist * std::cos(b),
                           a.y + dist * std::sin(b)};

    Eigen::RowVector3d J = snr_jacobian(a, t, p);
    if (fault == Fault::kJacobianSign) J(2) = -J(2);
    for (int k = 0; k < 3; ++k) {
      AgentState hi = a, lo = a;
      double* fields_hi[3] = {&hi.x, &hi.y, &hi.psi};
      double* fields_lo[3] = {&lo.x, &lo.y, &lo.psi};
      *fields_hi[k] += h;
      *fields_lo[k] -= h;
      const double fd =
          (snr_measure(hi, t, p) - snr_measure(lo, t, p)) / (2.0 * h);
      track(J(k), fd);
    }

    const double u = sym(m.u_max);
    const Eigen::Matrix3d F = fixedwing_jacobian(a, u, m);
    for (int k = 0; k < 3; ++k) {
      AgentState hi = a, lo = a;
      double* fields_hi[3] = {&hi.x, &hi.y, &hi.psi};
      double* fields_lo[3] = {&lo.x, &lo.y, &lo.psi};
      *fields_hi[k] += h;
      *fields_lo[k] -= h;
      const AgentState fhi = fixedwing_step(hi, u, m);
      const AgentState flo = fixedwing_step(lo, u, m);
      track(F(0, k), (fhi.x - flo.x) / (2.0 * h));
      track(F(1, k), (fhi.y - flo.y) / (2.0 * h));
      track(F(2, k), (fhi.psi - flo.psi) / (2.0 * h));
    }
  }

  SuiteResult r{"jacobian", max_rel < tol, ""};
  r.detail = strf("max relative error %.3g over 1000 sensor + 1000 motion "
                  "instances (tol %.0e)",
                  max_rel, tol);
  return r;
}

// ---- moments: Gaussian moment matching vs direct mixture sampling ----
//
// Draw (k, z) from the very mixture the matched Gaussian describes; the
// sample mean and covariance must land within their own Monte Carlo error
// of the matched moments. No linearization gap is involved, so 4-sigma
// allowances are tight and honest.

SuiteResult check_moments(std::uint64_t seed) {
  const int kInstances = 8;
  const std::size_t kDraws = 200000;
  double worst = 0.0;  // deviation as a fraction of its allowance

  for (int inst = 0; inst < kInstances; ++inst) {
    const rng::Stream cfg{rng::splitmix_fin(seed + 300 + 3 * inst)};
    const rng::Stream pick{rng::splitmix_fin(seed + 301 + 3 * inst)};
    const rng::Stream noise{rng::splitmix_fin(seed + 302 + 3 * inst)};
    std::uint64_t cc = 0;
    auto u01 = [&] { return cfg.uniform01(cc++); };

    const std::size_t n_v = 1 + static_cast<std::size_t>(inst % 3);
    const std::size_t n_p = 5 + static_cast<std::size_t>(inst % 4) * 7;

    std::vector<double> w(n_p);
    double wsum = 0.0;
    for (double& v : w) {
      v = 0.05 + u01();
      wsum += v;
    }
    for (double& v : w) v /= wsum;

    std::vector<MomentsBatch> mom(n_v);
    for (std::size_t i = 0; i < n_v; ++i) {
      mom[i].resize(n_p);
      for (std::size_t k = 0; k < n_p; ++k) {
        mom[i].mu[k] = -5.0 + 10.0 * u01();
        mom[i].var[k] = 0.5 + 2.0 * u01();
      }
    }

    const MixtureMoments mm = mixture_moments(w, mom);

    Eigen::VectorXd sum = Eigen::VectorXd::Zero(n_v);
    Eigen::MatrixXd sum2 = Eigen::MatrixXd::Zero(n_v, n_v);
    Eigen::VectorXd z(n_v);
    std::uint64_t nrm = 0;
    for (std::size_t sdraw = 0; sdraw < kDraws; ++sdraw) {
      const double uk = pick.uniform01(sdraw);
      std::size_t k = 0;
      double acc = w[0];
      while (uk >= acc && k + 1 < n_p) acc += w[++k];
      for (std::size_t i = 0; i < n_v; ++i)
        z(i) = mom[i].mu[k] + std::sqrt(mom[i].var[k]) * noise.normal(nrm++);
      sum += z;
      sum2 += z * z.transpose();
    }
    const double n = static_cast<double>(kDraws);
    const Eigen::VectorXd mean = sum / n;
    const Eigen::MatrixXd cov = sum2 / n - mean * mean.transpose();

    for (std::size_t i = 0; i < n_v; ++i) {
      const double se = std::sqrt(mm.cov(i, i) / n);
      worst = std::max(worst, std::abs(mean(i) - mm.mean(i)) / (4.0 * se));
      for (std::size_t j = 0; j <= i; ++j) {
        const double se_c = std::sqrt(
            (mm.cov(i, i) * mm.cov(j, j) + mm.cov(i, j) * mm.cov(i, j)) / n);
        worst = std::max(worst,
                         std::abs(cov(i, j) - mm.cov(i, j)) / (4.0 * se_c));
      }
    }
  }

  SuiteResult r{"moments", worst < 1.0, ""};
  r.detail = strf("worst moment deviation %.2f of its 4-sigma allowance "
                  "across %d sampled mixtures",
                  worst, 8);
  return r;
}

// ---- resampler: exactness contracts plus offspring unbiasedness ----

HybridBelief tiny_belief(const std::vector<double>& weights) {
  const std::size_t n = weights.size();
  HybridBelief hb;
  hb.weights = weights;
  hb.px.resize(n);
  hb.py.resize(n);
  hb.banks.resize(1);
  hb.banks[0].resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    hb.px[k] = static_cast<double>(k);
    hb.py[k] = 100.0 + static_cast<double>(k);
    GaussianBelief g;
    g.mean = Eigen::Vector3d(static_cast<double>(k), 0.0, 0.0);
    hb.banks[0].set(k, g);
  }
  return hb;
}

SuiteResult check_resampler(std::uint64_t seed) {
  std::string why;

  {  // equal weights, zero offset: the identity permutation, bit for bit
    const std::size_t n = 8;
    const HybridBelief hb = tiny_belief(std::vector<double>(n, 1.0 / 8.0));
    const HybridBelief out = low_variance_resample(hb, 0.0);
    for (std::size_t k = 0; k < n && why.empty(); ++k) {
      if (out.px[k] != hb.px[k] || out.py[k] != hb.py[k] ||
          out.weights[k] != 1.0 / 8.0 ||
          out.banks[0].get(k).mean(0) != hb.banks[0].get(k).mean(0))
        why = strf("identity case broke at particle %zu", k);
    }
  }

  if (why.empty()) {  // one-hot weights: every survivor is that particle
    std::vector<double> w(8, 0.0);
    w[5] = 1.0;
    const HybridBelief hb = tiny_belief(w);
    const HybridBelief out = low_variance_resample(hb, 0.07);
    for (std::size_t k = 0; k < 8 && why.empty(); ++k)
      if (out.px[k] != 5.0) why = "one-hot case picked a zero-weight particle";
  }

  double max_bias = 0.0;
  const double kRounds = 100000.0;
  if (why.empty()) {  // offspring counts average to n * w_i over comb offsets
    const rng::Stream s{rng::splitmix_fin(seed + 500)};
    std::vector<double> w = {0.02, 0.3, 0.08, 0.25, 0.05, 0.2, 0.1};
    const std::size_t n = w.size();
    const HybridBelief hb = tiny_belief(w);
    std::vector<double> counts(n, 0.0);
    for (std::uint64_t r = 0; r < 100000; ++r) {
      const double off = s.uniform01(r) / static_cast<double>(n);
      const HybridBelief out = low_variance_resample(hb, off);
      for (std::size_t m = 0; m < n; ++m)
        counts[static_cast<std::size_t>(out.px[m])] += 1.0;
    }
    // each count is one of two adjacent integers, so its variance is <= 1/4
    const double tol = 3.0 * 0.5 / std::sqrt(kRounds);
    for (std::size_t i = 0; i < n; ++i) {
      const double bias =
          std::abs(counts[i] / kRounds - static_cast<double>(n) * w[i]);
      max_bias = std::max(max_bias, bias);
    }
    if (!(max_bias < tol))
      why = strf("offspring bias %.4g exceeds %.4g", max_bias, tol);
  }

  SuiteResult r{"resampler", why.empty(), ""};
  r.detail = why.empty()
                 ? strf("identity and one-hot exact; offspring bias %.2g "
                        "within its 3-sigma bound",
                        max_bias)
                 : why;
  return r;
}

// ---- objective: entropy-difference identity and the Gaussian bound ----

double log_mixture_density(const std::vector<double>& w,
                           const std::vector<MomentsBatch>& mom,
                           const Eigen::VectorXd& z) {
  const std::size_t n_p = w.size();
  const std::size_t n_v = mom.size();
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> lg(n_p);
  for (std::size_t k = 0; k < n_p; ++k) {
    double l = std::log(w[k]);
    for (std::size_t i = 0; i < n_v; ++i) {
      const double d = z(i) - mom[i].mu[k];
      l += -0.5 * (std::log(kTwoPi * mom[i].var[k]) + d * d / mom[i].var[k]);
    }
    lg[k] = l;
    best = std::max(best, l);
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < n_p; ++k) acc += std::exp(lg[k] - best);
  return best + std::log(acc);
}

SuiteResult check_objective(std::uint64_t seed) {
  double max_identity_err = 0.0;
  double min_margin_sigmas = std::numeric_limits<double>::infinity();
  std::string why;

  for (int inst = 0; inst < 100; ++inst) {
    const rng::Stream cfg{rng::splitmix_fin(seed + 700 + inst)};
    std::uint64_t cc = 0;
    auto u01 = [&] { return cfg.uniform01(cc++); };

    const std::size_t n_v = 1 + static_cast<std::size_t>(inst % 3);
    const std::size_t n_p = 1 + static_cast<std::size_t>(inst % 7) * 4;
    std::vector<double> w(n_p);
    double wsum = 0.0;
    for (double& v : w) {
      v = 0.05 + u01();
      wsum += v;
    }
    for (double& v : w) v /= wsum;
    std::vector<MomentsBatch> mom(n_v);
    for (std::size_t i = 0; i < n_v; ++i) {
      mom[i].resize(n_p);
      for (std::size_t k = 0; k < n_p; ++k) {
        mom[i].mu[k] = -5.0 + 10.0 * u01();
        mom[i].var[k] = 0.5 + 2.5 * u01();
      }
    }
    const MixtureMoments mm = mixture_moments(w, mom);
    const double objective = mi_objective(w, mom, mm);

    // identity: the reduced form equals twice the entropy difference of the
    // matched Gaussian and the expected conditional entropy, with the
    // determinant evaluated by cofactor expansion instead of a factorization
    const double nv = static_cast<double>(n_v);
    const double h_z =
        0.5 * (nv * (1.0 + kLogTwoPi) + std::log(mm.cov.determinant()));
    double h_cond = 0.0;
    for (std::size_t k = 0; k < n_p; ++k) {
      double sum_log = 0.0;
      for (std::size_t i = 0; i < n_v; ++i) sum_log += std::log(mom[i].var[k]);
      h_cond += w[k] * 0.5 * (nv * (1.0 + kLogTwoPi) + sum_log);
    }
    const double err = std::abs(objective - 2.0 * (h_z - h_cond)) /
                       std::max(1.0, std::abs(objective));
    max_identity_err = std::max(max_identity_err, err);

    // Gaussian bound on the first few instances: the matched Gaussian's
    // entropy must not fall below a Monte Carlo estimate of the mixture's
    if (inst < 4) {
      const rng::Stream pick{rng::splitmix_fin(seed + 900 + 2 * inst)};
      const rng::Stream noise{rng::splitmix_fin(seed + 901 + 2 * inst)};
      const std::size_t kDraws = 20000;
      double acc = 0.0, acc2 = 0.0;
      Eigen::VectorXd z(n_v);
      std::uint64_t nrm = 0;
      for (std::size_t sdraw = 0; sdraw < kDraws; ++sdraw) {
        const double uk = pick.uniform01(sdraw);
        std::size_t k = 0;
        double a = w[0];
        while (uk >= a && k + 1 < n_p) a += w[++k];
        for (std::size_t i = 0; i < n_v; ++i)
          z(i) =
              mom[i].mu[k] + std::sqrt(mom[i].var[k]) * noise.normal(nrm++);
        const double lp = log_mixture_density(w, mom, z);
        acc += -lp;
        acc2 += lp * lp;
      }
      const double nd = static_cast<double>(kDraws);
      const double h_mc = acc / nd;
      const double var_lp = acc2 / nd - h_mc * h_mc;
      const double se = std::sqrt(std::max(var_lp, 0.0) / nd);
      const double margin = (h_z - h_mc) / se;  // >= -3 within MC error
      min_margin_sigmas = std::min(min_margin_sigmas, margin);
    }
  }

  const bool identity_ok = max_identity_err < 1e-12;
  const bool bound_ok = min_margin_sigmas > -3.0;
  SuiteResult r{"objective", identity_ok && bound_ok, ""};
  if (!identity_ok)
    why = strf("entropy identity off by %.3g (tol 1e-12)", max_identity_err);
  else if (!bound_ok)
    why = strf("matched-Gaussian entropy fell %.1f sigma below the mixture "
               "entropy",
               -min_margin_sigmas);
  r.detail = r.passed
                 ? strf("entropy identity within %.2g; Gaussian bound margin "
                        ">= %.1f sigma",
                        max_identity_err, min_margin_sigmas)
                 : why;
  return r;
}

}  // namespace

Fault fault_from_name(const std::string& s) {
  if (s.empty()) return Fault::kNone;
  if (s == "jacobian-sign") return Fault::kJacobianSign;
  throw ConfigError("unknown fault: " + s);
}

std::vector<SuiteResult> run_selfchecks(const std::string& filter, Fault fault,
                                        std::uint64_t seed) {
  const std::vector<std::string> names = {"jacobian", "moments", "resampler",
                                          "objective"};
  if (!filter.empty() &&
      std::find(names.begin(), names.end(), filter) == names.end())
    throw ConfigError("unknown suite: " + filter);

  std::vector<SuiteResult> out;
  auto want = [&](const char* n) { return filter.empty() || filter == n; };
  if (want("jacobian")) out.push_back(check_jacobian(fault, seed));
  if (want("moments")) out.push_back(check_moments(seed));
  if (want("resampler")) out.push_back(check_resampler(seed));
  if (want("objective")) out.push_back(check_objective(seed));
  return out;
}

}  // namespace miseeker
