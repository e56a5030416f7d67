#pragma once

#include <string>

#include "lcmpc/lcmpc.hpp"
#include "lcmpc/scenario_io.hpp"

namespace lcmpc::test {

inline ScenarioFile scenario_file(const std::string& name) {
  return load_scenario(std::string(LCMPC_SCENARIO_DIR) + "/" + name + ".cfg");
}

inline Scenario static_set() { return scenario_file("static").scenario; }
inline Scenario dynamic_set() { return scenario_file("dynamic").scenario; }

inline Scenario empty_road(double duration = 8.0) {
  Scenario sc;
  sc.name = "empty";
  sc.duration = duration;
  return sc;
}

inline Obstacle static_obstacle(std::string name, double x, double y) {
  Obstacle o;
  o.name = std::move(name);
  o.x0 = x;
  o.y0 = y;
  return o;
}

inline VehicleState straight(double vx = 10.0) { return {vx, 0.0, 0.0, 0.0, 0.0, 0.0}; }

}  // namespace lcmpc::test
