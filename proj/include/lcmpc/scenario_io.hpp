#pragma once

/**
 * @file scenario_io.hpp
 * @brief YAML scenario files. Requires yaml-cpp.
 *
 * Schema (every key optional unless marked):
 *
 *   name: static
 *   duration: 20.0                # [s]
 *   road: {lane_width: 3.5, n_lanes: 2, lower_boundary_y: -1.75}
 *   ego: {vx: 10, vy: 0, r: 0, X: 0, Y: 0, psi: 0}
 *   obstacles:
 *     - name: yellow              # required
 *       x: 25                     # required, initial CM position [m]
 *       y: 0                      # required
 *       length: 4.0
 *       width: 1.8
 *       safety_gap: 0.5
 *       initial_speed: 0          # [m/s]
 *       target_speed: 0           # [m/s]
 *       acceleration: 0.5         # [m/s^2]
 *   settings:                     # same keys as --set
 *     mpc.b3: 0.1
 *
 * Unknown keys are rejected with the offending key path in the message.
 */

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>

#include <yaml-cpp/yaml.h>

#include "lcmpc/config.hpp"
#include "lcmpc/errors.hpp"
#include "lcmpc/scenario.hpp"

namespace lcmpc {

struct ScenarioFile {
  Scenario scenario;
  Settings settings;
};

namespace detail {

inline void check_keys(const YAML::Node& map, const std::string& where,
                       std::initializer_list<const char*> allowed) {
  if (!map.IsMap()) throw ConfigError("'" + where + "' must be a mapping");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : map) {
    const std::string key = kv.first.as<std::string>();
    if (!ok.count(key)) throw ConfigError("unknown key '" + (where.empty() ? key : where + "." + key) + "'");
  }
}

inline std::string scalar_text(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) throw ConfigError("'" + key + "' must be a scalar");
  return n.Scalar();
}

inline void read_real(const YAML::Node& map, const char* name, const std::string& where, double& out) {
  if (const YAML::Node n = map[name]) {
    const std::string key = where.empty() ? name : where + "." + name;
    out = parse_real(scalar_text(n, key), key);
  }
}

inline void read_int(const YAML::Node& map, const char* name, const std::string& where, int& out) {
  if (const YAML::Node n = map[name]) {
    const std::string key = where.empty() ? name : where + "." + name;
    out = parse_int(scalar_text(n, key), key);
  }
}

inline ScenarioFile scenario_from_yaml(const YAML::Node& root, Settings base) {
  ScenarioFile out;
  out.settings = std::move(base);
  if (!root || root.IsNull()) throw ConfigError("scenario file is empty");
  check_keys(root, "", {"name", "duration", "road", "ego", "obstacles", "settings"});
  Scenario& sc = out.scenario;
  if (const YAML::Node n = root["name"]) sc.name = scalar_text(n, "name");
  read_real(root, "duration", "", sc.duration);

  if (const YAML::Node road = root["road"]) {
    check_keys(road, "road", {"lane_width", "n_lanes", "lower_boundary_y"});
    read_real(road, "lane_width", "road", sc.road.lane_width);
    read_int(road, "n_lanes", "road", sc.road.n_lanes);
    read_real(road, "lower_boundary_y", "road", sc.road.lower_boundary_y);
  }
  if (const YAML::Node ego = root["ego"]) {
    check_keys(ego, "ego", {"vx", "vy", "r", "X", "Y", "psi"});
    read_real(ego, "vx", "ego", sc.ego_initial.vx);
    read_real(ego, "vy", "ego", sc.ego_initial.vy);
    read_real(ego, "r", "ego", sc.ego_initial.r);
    read_real(ego, "X", "ego", sc.ego_initial.X);
    read_real(ego, "Y", "ego", sc.ego_initial.Y);
    read_real(ego, "psi", "ego", sc.ego_initial.psi);
  }
  if (const YAML::Node obs = root["obstacles"]) {
    if (!obs.IsSequence()) throw ConfigError("'obstacles' must be a list");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const YAML::Node o = obs[i];
      const std::string where = "obstacles[" + std::to_string(i) + "]";
      check_keys(o, where, {"name", "x", "y", "length", "width", "safety_gap", "initial_speed",
                            "target_speed", "acceleration"});
      for (const char* req : {"name", "x", "y"})
        if (!o[req]) throw ConfigError("missing key '" + where + "." + req + "'");
      Obstacle ob;
      ob.name = scalar_text(o["name"], where + ".name");
      read_real(o, "x", where, ob.x0);
      read_real(o, "y", where, ob.y0);
      read_real(o, "length", where, ob.length);
      read_real(o, "width", where, ob.width);
      read_real(o, "safety_gap", where, ob.safety_gap);
      read_real(o, "initial_speed", where, ob.speed.initial_speed);
      read_real(o, "target_speed", where, ob.speed.target_speed);
      read_real(o, "acceleration", where, ob.speed.acceleration);
      sc.obstacles.push_back(std::move(ob));
    }
  }
  if (const YAML::Node st = root["settings"]) {
    if (!st.IsMap()) throw ConfigError("'settings' must be a mapping");
    for (const auto& kv : st) {
      const std::string key = kv.first.as<std::string>();
      if (!find_setting(key)) throw ConfigError("unknown key 'settings." + key + "'");
      set_value(out.settings, key, scalar_text(kv.second, "settings." + key));
    }
  }
  return out;
}

}  // namespace detail

/// Parses a scenario document; `base` supplies settings the file does not mention.
inline ScenarioFile parse_scenario(const std::string& text, Settings base = {}) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("scenario file is not valid YAML: ") + e.what());
  }
  return detail::scenario_from_yaml(root, std::move(base));
}

inline ScenarioFile load_scenario(const std::filesystem::path& path, Settings base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read scenario file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scenario(ss.str(), std::move(base));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace lcmpc
