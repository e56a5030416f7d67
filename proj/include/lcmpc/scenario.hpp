#pragma once

/**
 * @file scenario.hpp
 * @brief Straight multi-lane road, obstacle motion and clearance queries.
 *
 * Obstacles drive along their lane (constant Y). Their longitudinal speed
 * ramps at a constant rate from an initial to a target speed and is held
 * afterwards. Collision checks treat the ego as its CM point against the
 * obstacle footprint inflated by a safety gap on all sides.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lcmpc/dynamics.hpp"
#include "lcmpc/errors.hpp"

namespace lcmpc {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Axis-aligned rectangle [x_min, x_max] x [y_min, y_max].
struct Rect {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  Rect inflated(double margin) const {
    return {x_min - margin, x_max + margin, y_min - margin, y_max + margin};
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Signed distance from p to the rectangle boundary: positive outside, negative inside.
inline double signed_distance(Point p, const Rect& rc) {
  const double dx = std::max({rc.x_min - p.x, 0.0, p.x - rc.x_max});
  const double dy = std::max({rc.y_min - p.y, 0.0, p.y - rc.y_max});
  if (dx > 0.0 || dy > 0.0) return std::hypot(dx, dy);
  const double depth =
      std::min({p.x - rc.x_min, rc.x_max - p.x, p.y - rc.y_min, rc.y_max - p.y});
  return -depth;
}

struct Road {
  double lane_width = 3.5;
  int n_lanes = 2;
  double lower_boundary_y = -1.75;

  double upper_boundary_y() const { return lower_boundary_y + n_lanes * lane_width; }

  /// Lane 0 is the lowest lane.
  double centreline_y(int lane) const { return lower_boundary_y + (lane + 0.5) * lane_width; }

  /// Index of the lane containing y, clamped to the road.
  int lane_of(double y) const {
    const int lane = static_cast<int>(std::floor((y - lower_boundary_y) / lane_width));
    return std::clamp(lane, 0, n_lanes - 1);
  }

  bool contains_y(double y) const { return y > lower_boundary_y && y < upper_boundary_y(); }

  void validate() const {
    if (!(lane_width > 0.0) || !std::isfinite(lane_width))
      throw ConfigError("road 'lane_width' must be > 0");
    if (n_lanes < 1 || n_lanes > 2) throw ConfigError("road 'n_lanes' must be 1 or 2");
    if (!std::isfinite(lower_boundary_y)) throw ConfigError("road 'lower_boundary_y' must be finite");
  }
};

/// Constant-rate ramp from initial_speed to target_speed, then constant.
struct SpeedProfile {
  double initial_speed = 0.0;  // [m/s]
  double target_speed = 0.0;   // [m/s]
  double acceleration = 0.5;   // ramp magnitude [m/s^2]

  double ramp_duration() const {
    if (acceleration <= 0.0 || initial_speed == target_speed) return 0.0;
    return std::abs(target_speed - initial_speed) / acceleration;
  }

  double speed_at(double t) const {
    const double tr = ramp_duration();
    if (tr == 0.0) return acceleration <= 0.0 ? initial_speed : target_speed;
    if (t >= tr) return target_speed;
    const double sign = target_speed > initial_speed ? 1.0 : -1.0;
    return initial_speed + sign * acceleration * t;
  }

  /// Distance travelled over [0, t].
  double distance_at(double t) const {
    const double tr = ramp_duration();
    if (tr == 0.0) return (acceleration <= 0.0 ? initial_speed : target_speed) * t;
    const double sign = target_speed > initial_speed ? 1.0 : -1.0;
    const double tt = std::min(t, tr);
    const double ramp = initial_speed * tt + 0.5 * sign * acceleration * tt * tt;
    return ramp + target_speed * std::max(0.0, t - tr);
  }
};

struct Obstacle {
  std::string name;
  double x0 = 0.0;  // initial CM position [m]
  double y0 = 0.0;
  double length = 4.0;
  double width = 1.8;
  SpeedProfile speed;
  double safety_gap = 0.5;

  bool is_static() const { return speed.initial_speed == 0.0 && speed.target_speed == 0.0; }

  void validate() const {
    const std::string tag = "obstacle '" + name + "': ";
    if (!(length > 0.0) || !(width > 0.0)) throw ConfigError(tag + "footprint must be positive");
    if (!(safety_gap > 0.0)) throw ConfigError(tag + "'safety_gap' must be > 0");
    if (speed.initial_speed < 0.0 || speed.target_speed < 0.0)
      throw ConfigError(tag + "speeds must be non-negative");
    if (speed.acceleration < 0.0) throw ConfigError(tag + "'acceleration' must be >= 0");
    if (!std::isfinite(x0) || !std::isfinite(y0)) throw ConfigError(tag + "position must be finite");
  }
};

struct ObstaclePose {
  double x = 0.0;
  double y = 0.0;
  double speed = 0.0;
};

inline ObstaclePose obstacle_pose_at(const Obstacle& o, double t) {
  t = std::max(t, 0.0);
  return {o.x0 + o.speed.distance_at(t), o.y0, o.speed.speed_at(t)};
}

/// Footprint at time t grown by the safety gap on every side.
inline Rect obstacle_boundary_at(const Obstacle& o, double t) {
  const ObstaclePose pose = obstacle_pose_at(o, t);
  const double hx = 0.5 * o.length + o.safety_gap;
  const double hy = 0.5 * o.width + o.safety_gap;
  return {pose.x - hx, pose.x + hx, pose.y - hy, pose.y + hy};
}

struct Scenario {
  std::string name;
  Road road;
  std::vector<Obstacle> obstacles;
  VehicleState ego_initial{10.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  double duration = 12.0;

  void validate() const {
    road.validate();
    for (const auto& o : obstacles) o.validate();
    if (!ego_initial.finite()) throw ConfigError("scenario 'ego' state must be finite");
    if (ego_initial.vx < kMinLongitudinalSpeed) throw ConfigError("scenario 'ego.vx' must be >= 0.1");
    if (!road.contains_y(ego_initial.Y))
      throw ConfigError("scenario 'ego.Y' lies outside the road boundaries");
    if (!(duration > 0.0)) throw ConfigError("scenario 'duration' must be > 0");
    const Point ego{ego_initial.X, ego_initial.Y};
    for (const auto& o : obstacles)
      if (signed_distance(ego, obstacle_boundary_at(o, 0.0)) <= 0.0)
        throw ConfigError("obstacle '" + o.name + "' initially overlaps the ego vehicle");
  }
};

/// Signed clearance from the ego CM to the nearest inflated obstacle; +inf without obstacles.
inline double min_obstacle_clearance(Point ego, double t, const Scenario& sc) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& o : sc.obstacles) best = std::min(best, signed_distance(ego, obstacle_boundary_at(o, t)));
  return best;
}

/// Reflection of the whole scenario about Y = 0.
inline Scenario mirrored(const Scenario& sc) {
  Scenario m = sc;
  m.name = sc.name + "_mirrored";
  m.road.lower_boundary_y = -sc.road.upper_boundary_y();
  m.ego_initial = mirrored(sc.ego_initial);
  for (auto& o : m.obstacles) o.y0 = -o.y0;
  return m;
}

}  // namespace lcmpc
