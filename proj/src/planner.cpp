#include "miseeker/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace miseeker {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

MixtureMoments mixture_from(const std::vector<double>& w,
                            const std::vector<const MomentsBatch*>& rows) {
  const std::size_t nv = rows.size();
  const std::size_t np = w.size();
  MixtureMoments mm;
  mm.mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nv));
  mm.cov.resize(static_cast<Eigen::Index>(nv), static_cast<Eigen::Index>(nv));
  for (std::size_t i = 0; i < nv; ++i) {
    const double* mu = rows[i]->mu.data();
    double s = 0.0;
    for (std::size_t k = 0; k < np; ++k) s += w[k] * mu[k];
    mm.mean(static_cast<Eigen::Index>(i)) = s;
  }
  for (std::size_t i = 0; i < nv; ++i) {
    const double* mu_i = rows[i]->mu.data();
    const double* var_i = rows[i]->var.data();
    const double mean_i = mm.mean(static_cast<Eigen::Index>(i));
    // Diagonal in the uncentered form (second moment minus squared mean);
    // the var term keeps it >= r_var up to rounding.
    double d = 0.0;
    for (std::size_t k = 0; k < np; ++k) {
      d += w[k] * (var_i[k] + mu_i[k] * mu_i[k]);
    }
    mm.cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
        d - mean_i * mean_i;
    // Off-diagonals centered: only the means couple across agents.
    for (std::size_t j = i + 1; j < nv; ++j) {
      const double* mu_j = rows[j]->mu.data();
      const double mean_j = mm.mean(static_cast<Eigen::Index>(j));
      double o = 0.0;
      for (std::size_t k = 0; k < np; ++k) {
        o += w[k] * ((mu_i[k] - mean_i) * (mu_j[k] - mean_j));
      }
      mm.cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = o;
      mm.cov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = o;
    }
  }
  return mm;
}

double log_det_or_throw(const Eigen::MatrixXd& cov) {
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw MomentDegenerate();
  const Eigen::MatrixXd& l = llt.matrixLLT();
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) logdet += std::log(l(i, i));
  return 2.0 * logdet;
}

/// Conditional-entropy term sum_k w_k sum_i log var_ik, with the logs
/// supplied precomputed per agent (bitwise identical to taking them inline).
double conditional_term(const std::vector<double>& w,
                        const std::vector<const double*>& logvar) {
  double total = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    double s = 0.0;
    for (const double* lv : logvar) s += lv[k];
    total += w[k] * s;
  }
  return total;
}

struct LevelCache {
  GaussianBank prior;
  MomentsBatch mom;
  std::vector<double> logvar;
  bool singular = false;
};

/// Whether a score belongs to the tie set anchored at the best one: within
/// kScoreMargin relative to the best. -inf never ties with anything (its
/// margin arithmetic would be NaN), matching the rule that only finite
/// candidates are selectable.
bool tied_with_best(double s, double best) {
  if (best == kNegInf) return false;
  return s > best - kScoreMargin * std::max(1.0, std::abs(best));
}

/// Rank-selects from `n` tied candidates with a uniform draw in [0, 1).
std::size_t tie_rank(double tie_u, std::size_t n) {
  const std::size_t i =
      static_cast<std::size_t>(tie_u * static_cast<double>(n));
  return i < n ? i : n - 1;  // tie_u < 1, but guard the rounding edge
}

}  // namespace

ActionGrid ActionGrid::symmetric(std::size_t levels, double u_max,
                                 SearchMode mode) {
  if (levels < 3 || levels % 2 == 0) {
    throw ConfigError("action grid: level count must be odd and >= 3");
  }
  if (!(u_max > 0.0)) throw ConfigError("action grid: u_max must be positive");
  ActionGrid g;
  g.mode = mode;
  const std::size_t half = (levels - 1) / 2;
  for (std::size_t j = half; j >= 1; --j) {
    g.values.push_back(-(u_max * static_cast<double>(j) /
                         static_cast<double>(half)));
  }
  g.values.push_back(0.0);
  for (std::size_t j = 1; j <= half; ++j) {
    g.values.push_back(u_max * static_cast<double>(j) /
                       static_cast<double>(half));
  }
  return g;
}

void ActionGrid::validate(double u_max) const {
  const std::size_t n = values.size();
  if (n < 3 || n % 2 == 0) {
    throw ConfigError("action grid: level count must be odd and >= 3");
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(values[i] < values[i + 1])) {
      throw ConfigError("action grid: values must be strictly ascending");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (values[i] != -values[n - 1 - i]) {
      throw ConfigError("action grid: values must be symmetric about zero");
    }
  }
  if (values[(n - 1) / 2] != 0.0) {
    throw ConfigError("action grid: values must contain zero");
  }
  if (values.front() != -u_max || values.back() != u_max) {
    throw ConfigError("action grid: values must span [-u_max, u_max]");
  }
}

std::size_t ActionGrid::zero_index() const { return (values.size() - 1) / 2; }

bool CandidateMoments::any_singular() const {
  return std::any_of(moments.begin(), moments.end(),
                     [](const MomentsBatch& m) { return m.any_singular(); });
}

CandidateMoments candidate_moments(const HybridBelief& hb,
                                   const JointAction& u, const MotionParams& m,
                                   const SensorParams& p) {
  const std::size_t nv = hb.agent_count();
  if (u.banks.size() != nv) {
    throw Error("candidate moments: action/agent count mismatch");
  }
  CandidateMoments out;
  out.priors.resize(nv);
  out.moments.resize(nv);
  for (std::size_t a = 0; a < nv; ++a) {
    ekf_predict_bank(hb.banks[a], u.banks[a], m, out.priors[a]);
    snr_moments_bank(out.priors[a], hb.px, hb.py, p, out.moments[a]);
  }
  return out;
}

MixtureMoments mixture_moments(const std::vector<double>& weights,
                               const std::vector<MomentsBatch>& moments) {
  std::vector<const MomentsBatch*> rows(moments.size());
  for (std::size_t i = 0; i < moments.size(); ++i) rows[i] = &moments[i];
  return mixture_from(weights, rows);
}

double mi_objective(const std::vector<double>& weights,
                    const std::vector<MomentsBatch>& moments,
                    const MixtureMoments& mm) {
  const double logdet = log_det_or_throw(mm.cov);
  double total = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    double s = 0.0;
    for (const MomentsBatch& row : moments) s += std::log(row.var[k]);
    total += weights[k] * s;
  }
  return logdet - total;
}

PlanOutcome plan_step(const HybridBelief& hb, const ActionGrid& grid,
                      const MotionParams& m, const SensorParams& p,
                      double tie_u) {
  grid.validate(m.u_max);
  const std::size_t nv = hb.agent_count();
  const std::size_t nl = grid.values.size();
  const std::size_t np = hb.particle_count();
  if (nv == 0 || np == 0) throw Error("plan: empty belief");
  if (!(tie_u >= 0.0 && tie_u < 1.0)) {
    throw Error("plan: tie draw outside [0, 1)");
  }

  // The time update and the measurement moments factor per agent, so the
  // whole search shares one cache of (agent, level) rows; a candidate is
  // then just a row selection plus the mixture reduction.
  std::vector<std::vector<LevelCache>> cache(nv);
  for (std::size_t a = 0; a < nv; ++a) {
    cache[a].resize(nl);
    for (std::size_t l = 0; l < nl; ++l) {
      LevelCache& c = cache[a][l];
      ekf_predict_bank(hb.banks[a], grid.values[l], m, c.prior);
      snr_moments_bank(c.prior, hb.px, hb.py, p, c.mom);
      c.singular = c.mom.any_singular();
      c.logvar.resize(np);
      for (std::size_t k = 0; k < np; ++k) {
        c.logvar[k] = std::log(c.mom.var[k]);
      }
    }
  }

  std::vector<const MomentsBatch*> rows(nv);
  std::vector<const double*> logvar(nv);
  const auto score = [&](const std::vector<std::size_t>& lv) -> double {
    for (std::size_t a = 0; a < nv; ++a) {
      if (cache[a][lv[a]].singular) return kNegInf;
      rows[a] = &cache[a][lv[a]].mom;
      logvar[a] = cache[a][lv[a]].logvar.data();
    }
    const MixtureMoments mm = mixture_from(hb.weights, rows);
    try {
      return log_det_or_throw(mm.cov) - conditional_term(hb.weights, logvar);
    } catch (const MomentDegenerate&) {
      return kNegInf;
    }
  };

  std::vector<std::size_t> best_lv;
  double best = kNegInf;

  if (grid.mode == SearchMode::kExhaustiveJoint) {
    // Odometer with the last agent fastest: candidate c enumerates in
    // ascending lexicographic order, so flat index c carries the rank the
    // tie selection is defined over.
    std::size_t count = 1;
    for (std::size_t a = 0; a < nv; ++a) count *= nl;
    std::vector<double> scores(count);
    std::vector<std::size_t> lv(nv, 0);
    double top = kNegInf;
    for (std::size_t c = 0; c < count; ++c) {
      top = std::max(top, scores[c] = score(lv));
      std::size_t a = nv;
      while (a > 0 && ++lv[a - 1] == nl) {
        lv[a - 1] = 0;
        --a;
      }
    }
    std::vector<std::size_t> ties;
    for (std::size_t c = 0; c < count; ++c) {
      if (tied_with_best(scores[c], top)) ties.push_back(c);
    }
    if (ties.empty()) throw PlannerStarved();
    std::size_t chosen = ties[tie_rank(tie_u, ties.size())];
    best = scores[chosen];
    best_lv.resize(nv);
    for (std::size_t a = nv; a > 0; --a) {
      best_lv[a - 1] = chosen % nl;
      chosen /= nl;
    }
  } else {
    std::vector<std::size_t> lv(nv, grid.zero_index());
    std::vector<double> scores(nl);
    for (std::size_t a = 0; a < nv; ++a) {
      double top = kNegInf;
      for (std::size_t l = 0; l < nl; ++l) {
        lv[a] = l;
        top = std::max(top, scores[l] = score(lv));
      }
      std::vector<std::size_t> ties;
      for (std::size_t l = 0; l < nl; ++l) {
        if (tied_with_best(scores[l], top)) ties.push_back(l);
      }
      if (ties.empty()) throw PlannerStarved();
      lv[a] = ties[tie_rank(tie_u, ties.size())];
      best = scores[lv[a]];
    }
    best_lv = lv;
  }

  if (!(best > kNegInf)) throw PlannerStarved();

  PlanOutcome out;
  out.objective = best;
  out.best.banks.resize(nv);
  out.cached.priors.resize(nv);
  out.cached.moments.resize(nv);
  for (std::size_t a = 0; a < nv; ++a) {
    out.best.banks[a] = grid.values[best_lv[a]];
    out.cached.priors[a] = std::move(cache[a][best_lv[a]].prior);
    out.cached.moments[a] = std::move(cache[a][best_lv[a]].mom);
  }
  return out;
}

}  // namespace miseeker
