#include "miseeker/config.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "miseeker/errors.hpp"

namespace miseeker {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config: " +
                    (path.empty() ? std::string("<root>") : path) + ": " +
                    what);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

/// Typed accessors over one JSON object with path-anchored errors.
struct Node {
  const json& j;
  std::string path;

  Node(const json& j_, std::string path_) : j(j_), path(std::move(path_)) {
    if (!j.is_object()) fail(path, "expected an object");
  }

  /// Any key outside `keys` is an error; silent fallback to a default
  /// would turn a typo into a wrong experiment.
  void allow(std::initializer_list<const char*> keys) const {
    for (const auto& item : j.items()) {
      bool known = false;
      for (const char* k : keys) {
        if (item.key() == k) {
          known = true;
          break;
        }
      }
      if (!known) fail(join(path, item.key()), "unknown key");
    }
  }

  bool has(const char* key) const { return j.contains(key); }
  const json& raw(const char* key) const { return j.at(key); }

  double num(const char* key, double cur) const {
    if (!has(key)) return cur;
    const json& v = j.at(key);
    if (!v.is_number()) fail(join(path, key), "expected a number");
    return v.get<double>();
  }

  double req_num(const char* key) const {
    if (!has(key)) fail(join(path, key), "missing required key");
    return num(key, 0.0);
  }

  std::size_t count(const char* key, std::size_t cur) const {
    if (!has(key)) return cur;
    const json& v = j.at(key);
    if (!v.is_number_integer()) fail(join(path, key), "expected an integer");
    const std::int64_t n = v.get<std::int64_t>();
    if (n < 1) fail(join(path, key), "must be >= 1");
    return static_cast<std::size_t>(n);
  }

  std::uint64_t uint64(const char* key, std::uint64_t cur) const {
    if (!has(key)) return cur;
    const json& v = j.at(key);
    if (!v.is_number_unsigned())
      fail(join(path, key), "expected a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  std::string str(const char* key, std::string cur) const {
    if (!has(key)) return cur;
    const json& v = j.at(key);
    if (!v.is_string()) fail(join(path, key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> num_array(const char* key,
                                std::vector<double> cur) const {
    if (!has(key)) return cur;
    const json& v = j.at(key);
    if (!v.is_array() || v.empty())
      fail(join(path, key), "expected a non-empty array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const json& e : v) {
      if (!e.is_number())
        fail(join(path, key), "expected a non-empty array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
};

const char* mode_name(SearchMode m) {
  return m == SearchMode::kExhaustiveJoint ? "exhaustive-joint"
                                           : "sequential-greedy";
}

json matrix_json(const Eigen::Matrix3d& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r)
    rows.push_back({m(r, 0), m(r, 1), m(r, 2)});
  return rows;
}

}  // namespace

AppConfig default_config() {
  AppConfig app;
  app.sweep.episode.resolve();
  return app;
}

AppConfig parse_config(const json& j) {
  AppConfig app;  // defaults; resolved only after every override is applied
  EpisodeConfig& ep = app.sweep.episode;

  Node root(j, "");
  root.allow({"agent_count", "region_m", "initial_agents", "horizon_steps",
              "particle_count", "seed", "algorithm", "noise_mult",
              "fixed_target_m", "base_sigma", "motion", "sensor", "planner",
              "sweep"});

  ep.n_v = root.count("agent_count", ep.n_v);

  if (root.has("region_m")) {
    Node r(root.raw("region_m"), "region_m");
    r.allow({"x_min", "x_max", "y_min", "y_max"});
    ep.region.x_min = r.num("x_min", ep.region.x_min);
    ep.region.x_max = r.num("x_max", ep.region.x_max);
    ep.region.y_min = r.num("y_min", ep.region.y_min);
    ep.region.y_max = r.num("y_max", ep.region.y_max);
  }

  if (root.has("initial_agents")) {
    const json& arr = root.raw("initial_agents");
    if (!arr.is_array()) fail("initial_agents", "expected an array");
    ep.initial_agents.clear();
    std::size_t i = 0;
    for (const json& e : arr) {
      Node a(e, "initial_agents[" + std::to_string(i) + "]");
      a.allow({"x_m", "y_m", "psi_rad"});
      AgentState s;
      s.x = a.req_num("x_m");
      s.y = a.req_num("y_m");
      s.psi = a.req_num("psi_rad");
      ep.initial_agents.push_back(s);
      ++i;
    }
  }

  ep.horizon = root.count("horizon_steps", ep.horizon);
  ep.n_p = root.count("particle_count", ep.n_p);
  ep.seed = root.uint64("seed", ep.seed);

  if (root.has("algorithm")) {
    const std::string s = root.str("algorithm", "");
    if (s != "proposed" && s != "pf-only")
      fail("algorithm", "expected \"proposed\" or \"pf-only\"");
    ep.algorithm = algorithm_from_name(s);
  }

  app.noise_mult = root.num("noise_mult", app.noise_mult);
  if (!(app.noise_mult >= 0.0)) fail("noise_mult", "must be >= 0");

  if (root.has("fixed_target_m")) {
    Node t(root.raw("fixed_target_m"), "fixed_target_m");
    t.allow({"x_m", "y_m"});
    ep.fixed_target = TargetPosition{t.req_num("x_m"), t.req_num("y_m")};
  }

  if (root.has("base_sigma")) {
    Node b(root.raw("base_sigma"), "base_sigma");
    b.allow({"x_m", "y_m", "psi_rad"});
    const double sx = b.num("x_m", std::sqrt(app.sweep.base_cov(0, 0)));
    const double sy = b.num("y_m", std::sqrt(app.sweep.base_cov(1, 1)));
    const double sp = b.num("psi_rad", std::sqrt(app.sweep.base_cov(2, 2)));
    if (!(sx >= 0.0)) fail("base_sigma.x_m", "must be >= 0");
    if (!(sy >= 0.0)) fail("base_sigma.y_m", "must be >= 0");
    if (!(sp >= 0.0)) fail("base_sigma.psi_rad", "must be >= 0");
    app.sweep.base_cov =
        Eigen::Vector3d(sx * sx, sy * sy, sp * sp).asDiagonal();
  }

  if (root.has("motion")) {
    Node m(root.raw("motion"), "motion");
    m.allow({"speed_mps", "dt_s", "gravity_mps2", "min_turn_radius_m"});
    const double speed = m.num("speed_mps", ep.motion.speed);
    const double dt = m.num("dt_s", ep.motion.dt);
    const double g = m.num("gravity_mps2", ep.motion.g);
    const double r_min = m.num("min_turn_radius_m", 3.0);
    if (!(speed > 0.0)) fail("motion.speed_mps", "must be > 0");
    if (!(dt > 0.0)) fail("motion.dt_s", "must be > 0");
    if (!(g > 0.0)) fail("motion.gravity_mps2", "must be > 0");
    if (!(r_min > 0.0)) fail("motion.min_turn_radius_m", "must be > 0");
    ep.motion.speed = speed;
    ep.motion.dt = dt;
    ep.motion.g = g;
    ep.motion.u_max = max_bank_for_radius(speed, r_min, g);
  }

  if (root.has("sensor")) {
    Node s(root.raw("sensor"), "sensor");
    s.allow({"alpha", "beta_m2", "gamma", "noise_var"});
    ep.sensor.alpha = s.num("alpha", ep.sensor.alpha);
    ep.sensor.beta = s.num("beta_m2", ep.sensor.beta);
    ep.sensor.gamma = s.num("gamma", ep.sensor.gamma);
    ep.sensor.r_var = s.num("noise_var", ep.sensor.r_var);
    if (!(ep.sensor.alpha > 0.0)) fail("sensor.alpha", "must be > 0");
    if (!(ep.sensor.beta > 0.0)) fail("sensor.beta_m2", "must be > 0");
    if (!(ep.sensor.gamma > 1.0)) fail("sensor.gamma", "must be > 1");
    if (!(ep.sensor.r_var > 0.0)) fail("sensor.noise_var", "must be > 0");
  }

  if (root.has("planner")) {
    Node p(root.raw("planner"), "planner");
    p.allow({"levels", "search_mode"});
    const std::size_t levels = p.count("levels", 5);
    if (levels < 3 || levels % 2 == 0)
      fail("planner.levels", "must be an odd count >= 3");
    const std::string mode_str = p.str("search_mode", "auto");
    SearchMode mode;
    if (mode_str == "auto") {
      mode = ep.n_v <= 3 ? SearchMode::kExhaustiveJoint
                         : SearchMode::kSequentialGreedy;
    } else if (mode_str == "exhaustive-joint") {
      mode = SearchMode::kExhaustiveJoint;
    } else if (mode_str == "sequential-greedy") {
      mode = SearchMode::kSequentialGreedy;
    } else {
      fail("planner.search_mode",
           "expected \"auto\", \"exhaustive-joint\", or "
           "\"sequential-greedy\"");
    }
    ep.grid = ActionGrid::symmetric(levels, ep.motion.u_max, mode);
  }

  if (root.has("sweep")) {
    Node s(root.raw("sweep"), "sweep");
    s.allow({"levels", "trials"});
    app.sweep.levels = s.num_array("levels", app.sweep.levels);
    for (double v : app.sweep.levels)
      if (!(v >= 0.0)) fail("sweep.levels", "levels must be >= 0");
    app.sweep.trials = s.count("trials", app.sweep.trials);
  }

  ep.resolve();
  ep.validate();
  app.sweep.validate();
  return app;
}

AppConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  return parse_config(j);
}

EpisodeConfig single_episode(const AppConfig& c) {
  EpisodeConfig ep = c.sweep.episode;
  const Eigen::Matrix3d cov = c.noise_mult * c.sweep.base_cov;
  ep.true_noise_cov = cov;
  ep.motion.q_cov =
      ep.algorithm == Algorithm::kPfOnly ? Eigen::Matrix3d::Zero() : cov;
  ep.resolve();
  ep.validate();
  return ep;
}

json config_snapshot(const AppConfig& c) {
  const EpisodeConfig& ep = c.sweep.episode;
  json j;
  j["agent_count"] = ep.n_v;
  j["region_m"] = {{"x_min", ep.region.x_min},
                   {"x_max", ep.region.x_max},
                   {"y_min", ep.region.y_min},
                   {"y_max", ep.region.y_max}};
  json agents = json::array();
  for (const AgentState& a : ep.initial_agents)
    agents.push_back({{"x_m", a.x}, {"y_m", a.y}, {"psi_rad", a.psi}});
  j["initial_agents"] = agents;
  j["horizon_steps"] = ep.horizon;
  j["particle_count"] = ep.n_p;
  j["seed"] = ep.seed;
  j["algorithm"] = algorithm_name(ep.algorithm);
  j["noise_mult"] = c.noise_mult;
  if (ep.fixed_target)
    j["fixed_target_m"] = {{"x_m", ep.fixed_target->x},
                           {"y_m", ep.fixed_target->y}};
  j["base_cov"] = matrix_json(c.sweep.base_cov);
  j["motion"] = {{"speed_mps", ep.motion.speed},
                 {"dt_s", ep.motion.dt},
                 {"gravity_mps2", ep.motion.g},
                 {"u_max_rad", ep.motion.u_max}};
  j["sensor"] = {{"alpha", ep.sensor.alpha},
                 {"beta_m2", ep.sensor.beta},
                 {"gamma", ep.sensor.gamma},
                 {"noise_var", ep.sensor.r_var}};
  j["planner"] = {{"grid_rad", ep.grid.values},
                  {"search_mode", mode_name(ep.grid.mode)}};
  j["sweep"] = {{"levels", c.sweep.levels}, {"trials", c.sweep.trials}};
  return j;
}

}  // namespace miseeker
