#pragma once

/**
 * @file harness.hpp
 * @brief Closed-loop simulation of the receding-horizon controller, the
 *        two-level (plan, then pure-pursuit tracking) baseline, and metrics.
 *
 * Each control period the controller sees the true plant state, picks a
 * control, and the plant advances one period under that control (zero-order
 * hold, RK4). Scenarios with moving obstacles regenerate the reference path
 * every period using the current ego position and speed to predict when the
 * ego reaches each obstacle; static scenarios plan once.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "lcmpc/dubins.hpp"
#include "lcmpc/dynamics.hpp"
#include "lcmpc/errors.hpp"
#include "lcmpc/mpc.hpp"
#include "lcmpc/scenario.hpp"

namespace lcmpc {

enum class ControllerKind { integrated, two_level };

inline std::string_view to_string(ControllerKind k) {
  return k == ControllerKind::integrated ? "integrated" : "two_level";
}

/// Pure-pursuit steering plus proportional speed hold.
struct BaselineConfig {
  double lookahead_time = 0.35;  // lookahead distance = max(min_lookahead, lookahead_time * vx)
  double min_lookahead = 2.0;    // [m]
  double speed_gain = 400.0;     // torque per unit speed error [N m / (m/s)]
};

struct HarnessOptions {
  PlanningOptions planning;
  BaselineConfig baseline;
  int max_consecutive_fallbacks = 5;  // abort after this many solver fallbacks in a row
};

struct LogRow {
  double t = 0.0;
  VehicleState state;
  ControlInput u;
  double J = 0.0;
  double Xd = 0.0;
  double Yd = 0.0;
  double clearance = 0.0;
  bool converged = true;

  friend bool operator==(const LogRow&, const LogRow&) = default;
};

enum class RunStatus { completed, plant_failure, solver_failure, planning_failure };

struct SimulationLog {
  ControllerKind controller = ControllerKind::integrated;
  std::vector<LogRow> rows;
  RunStatus status = RunStatus::completed;
  std::string error;
  ReferencePath initial_path;  // path planned at t = 0
  ReferencePath final_path;    // path in use at the last step
  int replans = 0;
  int failed_replans = 0;  // dynamic replans that fell back to the previous path
};

struct Metrics {
  double rms_lateral_error = 0.0;
  double max_lateral_error = 0.0;
  double min_clearance = std::numeric_limits<double>::infinity();
  double yaw_smoothness = 0.0;  // sum of dt * (dr/dt)^2
  double saturation_fraction = 0.0;
  std::size_t samples = 0;

  bool collision_free() const { return min_clearance > 0.0; }
};

inline bool has_moving_obstacles(const Scenario& sc) {
  return std::any_of(sc.obstacles.begin(), sc.obstacles.end(),
                     [](const Obstacle& o) { return !o.is_static(); });
}

inline std::size_t step_count(const Scenario& sc, const MpcConfig& cfg) {
  return static_cast<std::size_t>(std::llround(sc.duration / cfg.dt));
}

/// Pure-pursuit steering toward the path point one lookahead ahead of the rear axle.
inline ControlInput pure_pursuit(const VehicleState& s, const ReferencePath& path, double v_hold,
                                 const VehicleParams& p, const MpcConfig& cfg, const BaselineConfig& bc) {
  const Point rear{s.X - p.lr * std::cos(s.psi), s.Y - p.lr * std::sin(s.psi)};
  const double ld = std::max(bc.min_lookahead, bc.lookahead_time * s.vx);
  const double s0 = nearest_arclength(path, rear);
  const PathSample goal = sample_reference(path, std::min(s0 + ld, path.total_length));
  const double dx = goal.X - rear.x, dy = goal.Y - rear.y;
  const double dist = std::max(std::hypot(dx, dy), 1e-6);
  const double alpha = std::atan2(dy, dx) - s.psi;
  const double delta = std::atan2(2.0 * p.wheelbase() * std::sin(alpha), dist);
  return cfg.clip({delta, bc.speed_gain * (v_hold - s.vx)});
}

namespace detail {

inline ReferencePath plan_at(const Scenario& sc, const VehicleState& s, double t, double design_vx,
                             const VehicleParams& p, const PlanningOptions& opt) {
  return build_lane_change_path(sc, ArrivalModel{s.X, t, s.vx}, design_vx, p, opt);
}

}  // namespace detail

/// Closed-loop run of the chosen controller. Failures end the run early with a
/// partial log and a status other than `completed`.
inline SimulationLog run(const Scenario& sc, const VehicleParams& p, const MpcConfig& cfg,
                         ControllerKind controller, const HarnessOptions& opt = {}) {
  sc.validate();
  p.validate();
  cfg.validate();

  SimulationLog log;
  log.controller = controller;
  const std::size_t n = step_count(sc, cfg);
  log.rows.reserve(n + 1);
  const bool dynamic = has_moving_obstacles(sc);
  const double design_vx = sc.ego_initial.vx;

  VehicleState state = sc.ego_initial;
  ReferencePath path;
  try {
    path = build_lane_change_path(sc, design_vx, p, opt.planning);
  } catch (const InfeasibleGeometry& e) {
    log.status = RunStatus::planning_failure;
    log.error = e.what();
    return log;
  }
  log.initial_path = path;
  ControlSequence warm = ControlSequence::zeros(cfg.Np);
  int fallbacks = 0;

  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    if (dynamic && k > 0) {
      ++log.replans;
      try {
        path = detail::plan_at(sc, state, t, design_vx, p, opt.planning);
      } catch (const InfeasibleGeometry&) {
        ++log.failed_replans;
      }
    }

    LogRow row;
    row.t = t;
    row.state = state;
    if (controller == ControllerKind::integrated) {
      const StepResult res = solve_step(state, sc, path, p, cfg, warm, t);
      row.u = res.u0;
      row.J = res.J;
      row.converged = res.converged && !res.fallback;
      warm = shift_warm_start(res.seq);
      fallbacks = res.fallback ? fallbacks + 1 : 0;
    } else {
      row.u = pure_pursuit(state, path, design_vx, p, cfg, opt.baseline);
      row.J = 0.0;
      row.converged = true;
    }
    const PathSample ref = sample_reference(path, nearest_arclength(path, {state.X, state.Y}));
    row.Xd = ref.X;
    row.Yd = ref.Y;
    row.clearance = min_obstacle_clearance({state.X, state.Y}, t, sc);
    log.rows.push_back(row);

    if (fallbacks >= opt.max_consecutive_fallbacks) {
      log.status = RunStatus::solver_failure;
      log.error = "solver produced no finite cost for " + std::to_string(fallbacks) +
                  " consecutive steps at t = " + std::to_string(t);
      break;
    }
    if (k == n) break;
    try {
      state = step(state, row.u, p, cfg.dt);
    } catch (const PlantFailure& e) {
      log.status = RunStatus::plant_failure;
      log.error = e.what();
      break;
    }
  }
  log.final_path = path;
  return log;
}

inline SimulationLog run_baseline_two_level(const Scenario& sc, const VehicleParams& p,
                                            const MpcConfig& cfg, const HarnessOptions& opt = {}) {
  return run(sc, p, cfg, ControllerKind::two_level, opt);
}

/// True when either input sits on a bound of the control box.
inline bool saturated_input(const ControlInput& u, const MpcConfig& cfg) {
  return std::abs(u.delta_f) == cfg.delta_max || u.Tr == cfg.Td_max || u.Tr == -cfg.Tb_max;
}

inline Metrics compute_metrics(const SimulationLog& log, const ReferencePath& path, const MpcConfig& cfg) {
  Metrics m;
  m.samples = log.rows.size();
  if (log.rows.empty()) return m;
  double sq = 0.0;
  std::size_t saturated = 0;
  for (std::size_t k = 0; k < log.rows.size(); ++k) {
    const LogRow& row = log.rows[k];
    const Point pos{row.state.X, row.state.Y};
    const PathSample q = sample_reference(path, nearest_arclength(path, pos));
    const double e = std::hypot(q.X - pos.x, q.Y - pos.y);
    sq += e * e;
    m.max_lateral_error = std::max(m.max_lateral_error, e);
    m.min_clearance = std::min(m.min_clearance, row.clearance);
    if (k > 0) {
      const double dt = row.t - log.rows[k - 1].t;
      const double rdot = (row.state.r - log.rows[k - 1].state.r) / dt;
      m.yaw_smoothness += dt * rdot * rdot;
    }
    if (saturated_input(row.u, cfg)) ++saturated;
  }
  m.rms_lateral_error = std::sqrt(sq / static_cast<double>(log.rows.size()));
  m.saturation_fraction = static_cast<double>(saturated) / static_cast<double>(log.rows.size());
  return m;
}

/// Metrics against the reference logged at each step, i.e. the path in use at
/// that step. Matches the path overload for runs that never replan.
inline Metrics compute_metrics(const SimulationLog& log, const MpcConfig& cfg) {
  Metrics m;
  m.samples = log.rows.size();
  if (log.rows.empty()) return m;
  double sq = 0.0;
  std::size_t saturated = 0;
  for (std::size_t k = 0; k < log.rows.size(); ++k) {
    const LogRow& row = log.rows[k];
    const double e = std::hypot(row.Xd - row.state.X, row.Yd - row.state.Y);
    sq += e * e;
    m.max_lateral_error = std::max(m.max_lateral_error, e);
    m.min_clearance = std::min(m.min_clearance, row.clearance);
    if (k > 0) {
      const double dt = row.t - log.rows[k - 1].t;
      const double rdot = (row.state.r - log.rows[k - 1].state.r) / dt;
      m.yaw_smoothness += dt * rdot * rdot;
    }
    if (saturated_input(row.u, cfg)) ++saturated;
  }
  m.rms_lateral_error = std::sqrt(sq / static_cast<double>(log.rows.size()));
  m.saturation_fraction = static_cast<double>(saturated) / static_cast<double>(log.rows.size());
  return m;
}

/// Thresholds for "completed the lane change and came back".
struct ManoeuvreCheck {
  double reach_fraction = 0.8;   // peak lateral excursion toward the other lane, fraction of lane width
  double final_offset = 0.3;     // final distance from the starting lane centreline [m]
  double final_heading = 0.05;   // [rad]
};

inline bool completed_lane_change(const SimulationLog& log, const Scenario& sc,
                                  const ManoeuvreCheck& chk = {}) {
  if (log.rows.empty() || log.status != RunStatus::completed) return false;
  const int home = sc.road.lane_of(sc.ego_initial.Y);
  if (sc.road.n_lanes < 2) return false;
  const double y_home = sc.road.centreline_y(home);
  const double y_other = sc.road.centreline_y(home == 0 ? 1 : 0);
  const double dir = y_other > y_home ? 1.0 : -1.0;
  double peak = 0.0;
  for (const auto& row : log.rows) peak = std::max(peak, dir * (row.state.Y - y_home));
  const VehicleState& last = log.rows.back().state;
  return peak >= chk.reach_fraction * sc.road.lane_width &&
         std::abs(last.Y - y_home) <= chk.final_offset && std::abs(last.psi) <= chk.final_heading;
}

}  // namespace lcmpc
