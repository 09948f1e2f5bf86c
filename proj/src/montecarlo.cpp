#include "miseeker/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "miseeker/csv.hpp"

namespace miseeker {
namespace {

struct Task {
  std::size_t level_idx;
  std::size_t trial;
  Algorithm alg;
};

EpisodeConfig task_config(const SweepConfig& sc, const Task& t) {
  EpisodeConfig cfg = sc.episode;
  cfg.true_noise_cov = sc.levels[t.level_idx] * sc.base_cov;
  cfg.motion.q_cov = cfg.true_noise_cov;
  cfg.algorithm = t.alg;
  cfg.trial_id = t.level_idx * sc.trials + t.trial;
  if (t.alg == Algorithm::kPfOnly) cfg.motion.q_cov.setZero();
  return cfg;
}

double interp_quantile(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  const double h = p * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double ordered_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

bool completed(const TrialOutcome& o, std::size_t horizon) {
  return !o.halted && o.target_errors.size() == horizon;
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open for writing: " + path);
  f << body;
  if (!f) throw Error("write failed: " + path);
}

}  // namespace

void SweepConfig::validate() const {
  if (trials < 1) throw ConfigError("sweep: trials must be >= 1");
  if (levels.empty()) throw ConfigError("sweep: need at least one level");
  for (const double l : levels) {
    if (!(l >= 0.0)) throw ConfigError("sweep: level multipliers must be >= 0");
  }
  if (!run_proposed && !run_pf_only) {
    throw ConfigError("sweep: no algorithm enabled");
  }
  if (!base_cov.isApprox(base_cov.transpose(), 1e-12)) {
    throw ConfigError("sweep: base covariance must be symmetric");
  }
  episode.validate();
}

SweepResult run_sweep(const SweepConfig& sc, std::size_t workers) {
  sc.validate();
  std::vector<Task> tasks;
  for (std::size_t li = 0; li < sc.levels.size(); ++li) {
    for (std::size_t trial = 0; trial < sc.trials; ++trial) {
      if (sc.run_pf_only) tasks.push_back({li, trial, Algorithm::kPfOnly});
      if (sc.run_proposed) tasks.push_back({li, trial, Algorithm::kProposed});
    }
  }

  std::vector<TrialOutcome> out(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mu;

  const auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size() || failed.load()) return;
      try {
        const Task& t = tasks[i];
        const EpisodeConfig cfg = task_config(sc, t);
        const EpisodeResult er = run_episode(cfg);
        TrialOutcome& o = out[i];
        o.level_idx = t.level_idx;
        o.trial = t.trial;
        o.algorithm = t.alg;
        o.trial_id = cfg.trial_id;
        o.halted = er.halted;
        o.halt_reason = er.halt_reason;
        o.noise_digest = er.noise_digest;
        o.psd_repairs = er.psd_repairs;
        o.target_errors.reserve(er.records.size());
        o.agent_errors.reserve(er.records.size());
        for (const StepRecord& r : er.records) {
          o.target_errors.push_back(r.target_error);
          o.agent_errors.push_back(r.agent_error);
        }
      } catch (...) {
        const std::scoped_lock lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  std::size_t n_workers =
      workers != 0 ? workers : std::thread::hardware_concurrency();
  n_workers = std::clamp<std::size_t>(n_workers, 1, tasks.size());
  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (std::thread& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  SweepResult res;
  res.outcomes = std::move(out);
  for (const TrialOutcome& o : res.outcomes) {
    if (o.halted) ++res.halted_count;
  }
  // Pairing audit: both algorithms of one (level, trial) must have folded
  // identical noise values into their digests.
  if (sc.run_proposed && sc.run_pf_only) {
    for (std::size_t j = 0; j + 1 < res.outcomes.size(); j += 2) {
      const TrialOutcome& a = res.outcomes[j];
      const TrialOutcome& b = res.outcomes[j + 1];
      if (!a.halted && !b.halted && a.noise_digest != b.noise_digest) {
        res.pairing_ok = false;
      }
    }
  }
  return res;
}

std::optional<std::pair<double, double>> error_metrics(const EpisodeResult& er,
                                                       std::size_t horizon) {
  if (er.halted || horizon == 0 || er.records.size() != horizon) {
    return std::nullopt;
  }
  const StepRecord& r = er.records.back();
  return std::make_pair(r.target_error, r.agent_error);
}

SummaryRow quartile_summary(const std::vector<double>& errors, double level,
                            Algorithm algorithm, const std::string& metric) {
  if (errors.empty()) throw Error("quartile summary: empty sample");
  std::vector<double> sorted = errors;
  std::sort(sorted.begin(), sorted.end());
  SummaryRow row;
  row.level = level;
  row.algorithm = algorithm;
  row.metric = metric;
  row.q1 = interp_quantile(sorted, 0.25);
  row.mean = ordered_mean(errors);
  row.q3 = interp_quantile(sorted, 0.75);
  row.valid_trials = errors.size();
  return row;
}

std::vector<SummaryRow> summarize_sweep(const SweepConfig& sc,
                                        const SweepResult& sr) {
  std::vector<SummaryRow> rows;
  std::vector<Algorithm> algs;
  if (sc.run_pf_only) algs.push_back(Algorithm::kPfOnly);
  if (sc.run_proposed) algs.push_back(Algorithm::kProposed);
  for (std::size_t li = 0; li < sc.levels.size(); ++li) {
    for (const Algorithm alg : algs) {
      std::vector<double> target, agent;
      std::size_t halted = 0;
      for (const TrialOutcome& o : sr.outcomes) {
        if (o.level_idx != li || o.algorithm != alg) continue;
        if (!completed(o, sc.episode.horizon)) {
          ++halted;
          continue;
        }
        target.push_back(o.target_errors.back());
        agent.push_back(o.agent_errors.back());
      }
      if (target.empty()) continue;  // nothing summarizable at this combo
      SummaryRow t =
          quartile_summary(target, sc.levels[li], alg, "target");
      t.halted_trials = halted;
      rows.push_back(std::move(t));
      SummaryRow a = quartile_summary(agent, sc.levels[li], alg, "agent");
      a.halted_trials = halted;
      rows.push_back(std::move(a));
    }
  }
  return rows;
}

std::vector<TimeSeriesRow> timeseries_summary(const SweepConfig& sc,
                                              const SweepResult& sr) {
  std::vector<TimeSeriesRow> rows;
  std::vector<Algorithm> algs;
  if (sc.run_pf_only) algs.push_back(Algorithm::kPfOnly);
  if (sc.run_proposed) algs.push_back(Algorithm::kProposed);
  const std::size_t horizon = sc.episode.horizon;
  std::vector<double> vals;
  for (std::size_t li = 0; li < sc.levels.size(); ++li) {
    for (const Algorithm alg : algs) {
      std::vector<const TrialOutcome*> done;
      for (const TrialOutcome& o : sr.outcomes) {
        if (o.level_idx == li && o.algorithm == alg &&
            completed(o, horizon)) {
          done.push_back(&o);
        }
      }
      if (done.empty()) continue;
      for (const char* metric : {"target", "agent"}) {
        const bool is_target = metric[0] == 't';
        for (std::size_t t = 0; t < horizon; ++t) {
          vals.clear();
          for (const TrialOutcome* o : done) {
            vals.push_back(is_target ? o->target_errors[t]
                                     : o->agent_errors[t]);
          }
          const double mean = ordered_mean(vals);
          std::sort(vals.begin(), vals.end());
          rows.push_back({sc.levels[li], alg, metric,
                          static_cast<std::int64_t>(t + 1), mean,
                          interp_quantile(vals, 0.25),
                          interp_quantile(vals, 0.75)});
        }
      }
    }
  }
  return rows;
}

void write_summary_csv(const std::string& path,
                       const std::vector<SummaryRow>& rows) {
  std::string body = "level,algorithm,metric,q1,mean,q3,valid_trials,halted_trials\n";
  for (const SummaryRow& r : rows) {
    csv::append_number(body, r.level);
    body += ',';
    body += algorithm_name(r.algorithm);
    body += ',';
    body += r.metric;
    body += ',';
    csv::append_number(body, r.q1);
    body += ',';
    csv::append_number(body, r.mean);
    body += ',';
    csv::append_number(body, r.q3);
    body += ',';
    csv::append_number(body, static_cast<std::int64_t>(r.valid_trials));
    body += ',';
    csv::append_number(body, static_cast<std::int64_t>(r.halted_trials));
    body += '\n';
  }
  write_text_file(path, body);
}

void write_timeseries_csv(const std::string& path,
                          const std::vector<TimeSeriesRow>& rows) {
  std::string body = "level,algorithm,metric,time_step,mean,q1,q3\n";
  for (const TimeSeriesRow& r : rows) {
    csv::append_number(body, r.level);
    body += ',';
    body += algorithm_name(r.algorithm);
    body += ',';
    body += r.metric;
    body += ',';
    csv::append_number(body, r.time_step);
    body += ',';
    csv::append_number(body, r.mean);
    body += ',';
    csv::append_number(body, r.q1);
    body += ',';
    csv::append_number(body, r.q3);
    body += '\n';
  }
  write_text_file(path, body);
}

}  // namespace miseeker
