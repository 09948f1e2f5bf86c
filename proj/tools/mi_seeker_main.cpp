// Command-line front end: single episodes, noise-level sweeps, report
// tables, and the built-in numerical diagnostics.
//
// Exit codes: 0 success; 1 configuration or usage error; 2 the episode
// halted (filter divergence); 3 a sweep finished with fewer than 90% valid
// trials; 4 a diagnostic suite failed.

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "miseeker/config.hpp"
#include "miseeker/csv.hpp"
#include "miseeker/errors.hpp"
#include "miseeker/montecarlo.hpp"
#include "miseeker/selfcheck.hpp"
#include "miseeker/world.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using miseeker::AppConfig;
using nlohmann::json;

std::string out_root() {
  const char* e = std::getenv("MI_SEEKER_OUT");
  return (e && *e) ? std::string(e) : std::string("out");
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw miseeker::Error("cannot open " + path + " for writing");
  f << body;
  if (!f) throw miseeker::Error("short write to " + path);
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return std::string(buf);
}

json matrix3_json(const Eigen::Matrix3d& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back({m(r, 0), m(r, 1), m(r, 2)});
  return rows;
}

void write_manifest(const std::string& dir, const char* command,
                    const AppConfig& app, std::uint64_t seed,
                    const std::vector<std::string>& outputs,
                    double duration_s, std::size_t workers,
                    const json* episode = nullptr) {
  json m;
  m["command"] = command;
  m["version"] = kVersion;
  if (episode != nullptr) m["episode"] = *episode;
  m["seed"] = seed;
  if (workers > 0) m["workers"] = workers;
  m["config"] = miseeker::config_snapshot(app);
  m["outputs"] = outputs;
  m["duration_s"] = duration_s;
  write_file(dir + "/manifest.json", m.dump(2) + "\n");
}

// ---- run ----

int cmd_run(const AppConfig& app, const std::string& dir) {
  namespace ms = miseeker;
  const auto t0 = std::chrono::steady_clock::now();
  const ms::EpisodeConfig ep = ms::single_episode(app);
  const ms::EpisodeResult er = ms::run_episode(ep);

  std::string steps =
      "time_step,target_est_x,target_est_y,target_error,agent_error,"
      "n_eff,resampled,objective\n";
  std::string agents =
      "time_step,agent,bank_rad,true_x,true_y,true_psi,"
      "est_x,est_y,est_psi,z\n";
  for (const ms::StepRecord& r : er.records) {
    ms::csv::append_number(steps, r.time_step);
    steps += ',';
    ms::csv::append_number(steps, r.target_estimate.x);
    steps += ',';
    ms::csv::append_number(steps, r.target_estimate.y);
    steps += ',';
    ms::csv::append_number(steps, r.target_error);
    steps += ',';
    ms::csv::append_number(steps, r.agent_error);
    steps += ',';
    ms::csv::append_number(steps, r.n_eff);
    steps += ',';
    steps += r.resampled ? '1' : '0';
    steps += ',';
    ms::csv::append_number(steps, r.objective);
    steps += '\n';
    for (std::size_t a = 0; a < r.true_agents.size(); ++a) {
      ms::csv::append_number(agents, r.time_step);
      agents += ',';
      ms::csv::append_number(agents, static_cast<std::int64_t>(a));
      agents += ',';
      ms::csv::append_number(agents, r.action[a]);
      agents += ',';
      ms::csv::append_number(agents, r.true_agents[a].x);
      agents += ',';
      ms::csv::append_number(agents, r.true_agents[a].y);
      agents += ',';
      ms::csv::append_number(agents, r.true_agents[a].psi);
      agents += ',';
      ms::csv::append_number(agents, r.agent_estimates[a](0));
      agents += ',';
      ms::csv::append_number(agents, r.agent_estimates[a](1));
      agents += ',';
      ms::csv::append_number(agents, r.agent_estimates[a](2));
      agents += ',';
      ms::csv::append_number(agents, r.measurements[a]);
      agents += '\n';
    }
  }
  write_file(dir + "/episode.csv", steps);
  write_file(dir + "/agents.csv", agents);

  json side;
  side["halted"] = er.halted;
  side["halt_step"] = er.halt_step;
  side["halt_reason"] = er.halt_reason;
  side["noise_digest"] = hex64(er.noise_digest);
  side["psd_repairs"] = er.psd_repairs;
  side["steps"] = er.records.size();
  if (!er.records.empty() && !er.halted) {
    side["final_target_error"] = er.records.back().target_error;
    side["final_agent_error"] = er.records.back().agent_error;
  }
  write_file(dir + "/episode.json", side.dump(2) + "\n");

  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
  json epj;
  epj["trial_id"] = ep.trial_id;
  epj["algorithm"] = ms::algorithm_name(ep.algorithm);
  epj["true_noise_cov"] = matrix3_json(ep.true_noise_cov);
  epj["assumed_noise_cov"] = matrix3_json(ep.motion.q_cov);
  write_manifest(dir, "run", app, ep.seed,
                 {"episode.csv", "agents.csv", "episode.json"}, secs, 0,
                 &epj);

  if (er.halted) {
    std::fprintf(stderr, "episode halted at step %" PRId64 ": %s\n",
                 er.halt_step, er.halt_reason.c_str());
    return 2;
  }
  const ms::StepRecord& last = er.records.back();
  std::printf("episode: %zu steps, final target error %.4f m, "
              "agent error %.4f m (%s)\n",
              er.records.size(), last.target_error, last.agent_error,
              ms::algorithm_name(ep.algorithm).c_str());
  return 0;
}

// ---- sweep ----

int cmd_sweep(const AppConfig& app, const std::string& dir,
              std::size_t workers) {
  namespace ms = miseeker;
  const auto t0 = std::chrono::steady_clock::now();
  const ms::SweepResult sr = ms::run_sweep(app.sweep, workers);
  const std::vector<ms::SummaryRow> rows = ms::summarize_sweep(app.sweep, sr);
  const std::vector<ms::TimeSeriesRow> ts =
      ms::timeseries_summary(app.sweep, sr);
  ms::write_summary_csv(dir + "/summary.csv", rows);
  ms::write_timeseries_csv(dir + "/timeseries.csv", ts);

  json sj;
  sj["halted_count"] = sr.halted_count;
  sj["pairing_ok"] = sr.pairing_ok;
  sj["episodes"] = sr.outcomes.size();
  json outs = json::array();
  for (const ms::TrialOutcome& o : sr.outcomes) {
    json e;
    e["level"] = app.sweep.levels[o.level_idx];
    e["trial"] = o.trial;
    e["algorithm"] = ms::algorithm_name(o.algorithm);
    e["trial_id"] = o.trial_id;
    e["halted"] = o.halted;
    if (o.halted) e["halt_reason"] = o.halt_reason;
    e["noise_digest"] = hex64(o.noise_digest);
    e["psd_repairs"] = o.psd_repairs;
    outs.push_back(std::move(e));
  }
  sj["trials"] = std::move(outs);
  write_file(dir + "/sweep.json", sj.dump(2) + "\n");

  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
  write_manifest(dir, "sweep", app, app.sweep.episode.seed,
                 {"summary.csv", "timeseries.csv", "sweep.json"}, secs,
                 workers);

  for (const ms::SummaryRow& r : rows)
    std::printf("level %-5.2f %-8s %-6s mean %8.4f  q1 %8.4f  q3 %8.4f  "
                "(%zu valid, %zu halted)\n",
                r.level, ms::algorithm_name(r.algorithm).c_str(),
                r.metric.c_str(), r.mean, r.q1, r.q3, r.valid_trials,
                r.halted_trials);

  const double total = static_cast<double>(sr.outcomes.size());
  const double valid = total - static_cast<double>(sr.halted_count);
  std::printf("sweep: %zu episodes, %zu halted, pairing %s, %.1fs\n",
              sr.outcomes.size(), sr.halted_count,
              sr.pairing_ok ? "ok" : "MISMATCH", secs);
  if (!sr.pairing_ok)
    std::fprintf(stderr,
                 "warning: paired runs consumed different noise draws\n");
  return (total > 0.0 && valid / total < 0.9) ? 3 : 0;
}

// ---- report ----

struct Cell {
  double q1 = std::numeric_limits<double>::quiet_NaN();
  double mean = std::numeric_limits<double>::quiet_NaN();
  double q3 = std::numeric_limits<double>::quiet_NaN();
};

int cmd_report(const std::string& in_dir, const std::string& dir) {
  namespace ms = miseeker;
  const std::string path = in_dir + "/summary.csv";
  std::ifstream f(path);
  if (!f) throw ms::ConfigError("report: cannot open " + path);

  std::string line;
  if (!std::getline(f, line) ||
      line !=
          "level,algorithm,metric,q1,mean,q3,valid_trials,halted_trials")
    throw ms::ConfigError("report: " + path + " is not a sweep summary");

  std::vector<double> levels;                      // first-seen order
  std::map<std::string, std::map<double, Cell>> cells;  // "alg|metric"
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        parts.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    if (parts.size() != 8)
      throw ms::ConfigError("report: malformed row in " + path);
    const double level = std::stod(parts[0]);
    bool seen = false;
    for (double l : levels) seen = seen || l == level;
    if (!seen) levels.push_back(level);
    Cell c;
    c.q1 = std::stod(parts[3]);
    c.mean = std::stod(parts[4]);
    c.q3 = std::stod(parts[5]);
    cells[parts[1] + "|" + parts[2]][level] = c;
  }

  const char* combos[4] = {"pf-only|target", "pf-only|agent",
                           "proposed|target", "proposed|agent"};

  std::string csv =
      "level,pf_only_target_q1,pf_only_target_mean,pf_only_target_q3,"
      "pf_only_agent_q1,pf_only_agent_mean,pf_only_agent_q3,"
      "proposed_target_q1,proposed_target_mean,proposed_target_q3,"
      "proposed_agent_q1,proposed_agent_mean,proposed_agent_q3\n";
  for (double level : levels) {
    ms::csv::append_number(csv, level);
    for (const char* combo : combos) {
      const Cell c = cells[combo].count(level) ? cells[combo][level] : Cell{};
      csv += ',';
      ms::csv::append_number(csv, c.q1);
      csv += ',';
      ms::csv::append_number(csv, c.mean);
      csv += ',';
      ms::csv::append_number(csv, c.q3);
    }
    csv += '\n';
  }
  write_file(dir + "/table1.csv", csv);

  std::string text;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-6s  %-26s  %-26s  %-26s  %-26s\n",
                "level", "pf-only target", "pf-only agent", "proposed target",
                "proposed agent");
  text += buf;
  std::snprintf(buf, sizeof buf, "%-6s  %-26s  %-26s  %-26s  %-26s\n", "",
                "q1 / mean / q3", "q1 / mean / q3", "q1 / mean / q3",
                "q1 / mean / q3");
  text += buf;
  for (double level : levels) {
    std::snprintf(buf, sizeof buf, "%-6.2f", level);
    text += buf;
    for (const char* combo : combos) {
      const Cell c = cells[combo].count(level) ? cells[combo][level] : Cell{};
      std::snprintf(buf, sizeof buf, "  %7.4f / %7.4f / %7.4f", c.q1, c.mean,
                    c.q3);
      text += buf;
    }
    text += '\n';
  }
  write_file(dir + "/table1.txt", text);
  std::fputs(text.c_str(), stdout);
  return 0;
}

// ---- check ----

int cmd_check(const std::string& suite, const std::string& inject,
              std::uint64_t seed) {
  namespace ms = miseeker;
  const std::vector<ms::SuiteResult> results =
      ms::run_selfchecks(suite, ms::fault_from_name(inject), seed);
  std::string failed;
  for (const ms::SuiteResult& r : results) {
    std::printf("%-10s %-5s %s\n", r.name.c_str(),
                r.passed ? "pass" : "FAIL", r.detail.c_str());
    if (!r.passed) {
      if (!failed.empty()) failed += ", ";
      failed += r.name;
    }
  }
  if (!failed.empty()) {
    std::fprintf(stderr, "check failed: %s\n", failed.c_str());
    return 4;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mobile sensor network simulator: mutual-information planning "
               "with a hybrid particle/EKF filter"};
  app.require_subcommand(1);

  std::string config_path, out_dir, algorithm, suite, inject, in_dir;
  std::uint64_t seed = 0;
  double noise_mult = 1.0;
  std::size_t workers = 0;
  std::size_t trials = 0;

  CLI::App* run = app.add_subcommand("run", "simulate one episode");
  run->add_option("--config", config_path, "JSON config file");
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--algorithm", algorithm, "proposed | pf-only");
  run->add_option("--noise-mult", noise_mult,
                  "process-noise multiplier for this run");
  run->add_option("--out", out_dir, "output directory");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "paired episodes across noise levels and trials");
  sweep->add_option("--config", config_path, "JSON config file");
  sweep->add_option("--seed", seed, "override the config seed");
  sweep->add_option("--trials", trials, "override trials per level");
  sweep->add_option("--workers", workers, "worker threads (0: all cores)");
  sweep->add_option("--out", out_dir, "output directory");

  CLI::App* report =
      app.add_subcommand("report", "tabulate a finished sweep");
  report->add_option("--in", in_dir, "sweep output directory")->required();
  report->add_option("--out", out_dir,
                     "output directory (default: the input directory)");

  CLI::App* check =
      app.add_subcommand("check", "run the built-in numerical diagnostics");
  check->add_option("--suite", suite,
                    "jacobian | moments | resampler | objective");
  check->add_option("--seed", seed, "diagnostic sampling seed");
  check->add_option("--inject", inject, "deliberate fault for negative tests")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    AppConfig cfg = config_path.empty()
                        ? miseeker::default_config()
                        : miseeker::load_config_file(config_path);

    if (run->parsed()) {
      if (run->count("--seed")) cfg.sweep.episode.seed = seed;
      if (run->count("--algorithm"))
        cfg.sweep.episode.algorithm = miseeker::algorithm_from_name(algorithm);
      if (run->count("--noise-mult")) {
        if (!(noise_mult >= 0.0))
          throw miseeker::ConfigError("--noise-mult must be >= 0");
        cfg.noise_mult = noise_mult;
      }
      const std::string dir =
          out_dir.empty() ? out_root() + "/run" : out_dir;
      std::filesystem::create_directories(dir);
      return cmd_run(cfg, dir);
    }
    if (sweep->parsed()) {
      if (sweep->count("--seed")) cfg.sweep.episode.seed = seed;
      if (sweep->count("--trials")) {
        if (trials == 0)
          throw miseeker::ConfigError("--trials must be >= 1");
        cfg.sweep.trials = trials;
      }
      cfg.sweep.validate();
      const std::string dir =
          out_dir.empty() ? out_root() + "/sweep" : out_dir;
      std::filesystem::create_directories(dir);
      return cmd_sweep(cfg, dir, workers);
    }
    if (report->parsed()) {
      const std::string dir = out_dir.empty() ? in_dir : out_dir;
      std::filesystem::create_directories(dir);
      return cmd_report(in_dir, dir);
    }
    if (check->parsed()) return cmd_check(suite, inject, seed);
  } catch (const miseeker::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
