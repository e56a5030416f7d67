#pragma once

/**
 * @file dubins.hpp
 * @brief Lane-change reference paths built from straight lines and
 *        maximum-lateral-acceleration circular arcs.
 *
 * Every lane change is an S made of two tangent arcs of the minimum turn
 * radius R = vx^2 / (mu g): the first arc leaves the current lane centreline,
 * the second lands tangentially on the adjacent one. Straight segments run
 * along lane centrelines in between.
 *
 * Obstacles are handled in the ego's longitudinal coordinate. With the ego
 * assumed to cruise at constant speed, each obstacle blocks the lane it sits
 * in over an x-interval (for a static obstacle that is simply its inflated
 * footprint). The planner keeps to the starting lane, leaves it as late as
 * the arc geometry allows before a blockage and returns as early as the
 * trailing edge allows. Waypoints record the tangent points of every arc.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lcmpc/dynamics.hpp"
#include "lcmpc/errors.hpp"
#include "lcmpc/scenario.hpp"

namespace lcmpc {

/// Radius of the circle driven at the friction-limited lateral acceleration.
inline double min_turn_radius(double vx, const VehicleParams& p) {
  return vx * vx / (p.mu * p.g);
}

enum class SegmentKind { line, arc };

struct PathSample {
  double X = 0.0;
  double Y = 0.0;
  double heading = 0.0;
  double curvature = 0.0;
};

struct PathSegment {
  SegmentKind kind = SegmentKind::line;
  Point start;
  Point end;
  double heading0 = 0.0;  // heading at start
  double length = 0.0;
  // arc only
  Point centre;
  double radius = 0.0;
  int turn = 0;  // +1 counter-clockwise (left), -1 clockwise (right)

  static PathSegment line(Point a, double heading, double length) {
    PathSegment s;
    s.kind = SegmentKind::line;
    s.start = a;
    s.heading0 = heading;
    s.length = length;
    s.end = {a.x + length * std::cos(heading), a.y + length * std::sin(heading)};
    return s;
  }

  static PathSegment arc(Point a, double heading, double radius, int turn, double angle) {
    PathSegment s;
    s.kind = SegmentKind::arc;
    s.start = a;
    s.heading0 = heading;
    s.radius = radius;
    s.turn = turn;
    s.length = radius * angle;
    s.centre = {a.x - turn * radius * std::sin(heading), a.y + turn * radius * std::cos(heading)};
    s.end = {s.at(s.length).X, s.at(s.length).Y};
    return s;
  }

  double end_heading() const {
    return kind == SegmentKind::line ? heading0 : heading0 + turn * length / radius;
  }

  /// Pose at arclength u from the segment start.
  PathSample at(double u) const {
    if (kind == SegmentKind::line)
      return {start.x + u * std::cos(heading0), start.y + u * std::sin(heading0), heading0, 0.0};
    const double h = heading0 + turn * u / radius;
    return {centre.x + turn * radius * std::sin(h), centre.y - turn * radius * std::cos(h), h,
            turn / radius};
  }

  /// Arclength of the point on this segment nearest to p.
  double project(Point p) const {
    if (kind == SegmentKind::line) {
      const double u = (p.x - start.x) * std::cos(heading0) + (p.y - start.y) * std::sin(heading0);
      return std::clamp(u, 0.0, length);
    }
    // Angle of p around the centre, expressed as arclength from start.
    const double a0 = std::atan2(start.y - centre.y, start.x - centre.x);
    const double ap = std::atan2(p.y - centre.y, p.x - centre.x);
    double sweep = turn * (ap - a0);
    sweep = std::remainder(sweep, 2.0 * std::numbers::pi);
    const double total = length / radius;
    if (sweep >= 0.0 && sweep <= total) return sweep * radius;
    // Outside the arc span: pick the closer endpoint.
    return distance(p, start) <= distance(p, end) ? 0.0 : length;
  }
};

struct Waypoint {
  std::string label;
  Point p;
};

struct ReferencePath {
  std::vector<PathSegment> segments;
  std::vector<Waypoint> waypoints;
  std::vector<double> segment_offsets;  // arclength at the start of each segment
  double total_length = 0.0;
  double radius = 0.0;        // construction radius of every arc
  double design_speed = 0.0;  // speed the arcs were sized for [m/s]

  void append(const PathSegment& s) {
    segment_offsets.push_back(total_length);
    segments.push_back(s);
    total_length += s.length;
  }

  double max_abs_curvature() const {
    double k = 0.0;
    for (const auto& s : segments)
      if (s.kind == SegmentKind::arc) k = std::max(k, 1.0 / s.radius);
    return k;
  }
};

/// Pose on the path at arclength s in [0, total_length].
inline PathSample sample_reference(const ReferencePath& path, double s) {
  if (path.segments.empty()) throw std::out_of_range("sample_reference: empty path");
  constexpr double kSlack = 1e-9;
  if (!(s >= -kSlack && s <= path.total_length + kSlack))
    throw std::out_of_range("sample_reference: arclength " + std::to_string(s) +
                            " outside [0, " + std::to_string(path.total_length) + "]");
  s = std::clamp(s, 0.0, path.total_length);
  auto it = std::upper_bound(path.segment_offsets.begin(), path.segment_offsets.end(), s);
  std::size_t i = static_cast<std::size_t>(std::distance(path.segment_offsets.begin(), it));
  i = i == 0 ? 0 : i - 1;
  const PathSegment& seg = path.segments[i];
  return seg.at(std::min(s - path.segment_offsets[i], seg.length));
}

/// Arclength of the path point nearest to p (first one on ties).
inline double nearest_arclength(const ReferencePath& path, Point p) {
  double best_d = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  for (std::size_t i = 0; i < path.segments.size(); ++i) {
    const double u = path.segments[i].project(p);
    const PathSample q = path.segments[i].at(u);
    const double d = std::hypot(q.X - p.x, q.Y - p.y);
    if (d < best_d) {
      best_d = d;
      best_s = path.segment_offsets[i] + u;
    }
  }
  return best_s;
}

/// Reference points i*dt*speed ahead of the ego's nearest path point, i = 1..Np,
/// clamped to the path end. `speed` defaults to the ego's vx.
inline std::vector<Point> reference_for_horizon(const ReferencePath& path, const VehicleState& ego,
                                                int Np, double dt,
                                                std::optional<double> speed = std::nullopt) {
  const double v = speed.value_or(ego.vx);
  const double s0 = nearest_arclength(path, {ego.X, ego.Y});
  std::vector<Point> refs;
  refs.reserve(static_cast<std::size_t>(std::max(Np, 0)));
  for (int i = 1; i <= Np; ++i) {
    const double s = std::min(s0 + i * dt * v, path.total_length);
    const PathSample q = sample_reference(path, s);
    refs.push_back({q.X, q.Y});
  }
  return refs;
}

// ---------------------------------------------------------------------------
// Lane-change construction

/// Two-arc S manoeuvre shifting laterally by `shift` with arcs of `radius`.
/// Coordinates are relative: longitudinal distance from the S start, lateral
/// offset from the departure lane centreline toward the arrival lane.
struct LaneChangeShape {
  double radius = 0.0;
  double shift = 0.0;
  double turn_angle = 0.0;  // per arc [rad]
  double span = 0.0;        // longitudinal extent [m]

  LaneChangeShape(double r, double h) : radius(r), shift(h) {
    if (!(r > 0.0)) throw InfeasibleGeometry("lane change needs a positive turn radius");
    if (h > 2.0 * r)
      throw InfeasibleGeometry("lane shift " + std::to_string(h) + " m exceeds twice the turn radius " +
                               std::to_string(r) + " m");
    turn_angle = std::acos(1.0 - h / (2.0 * r));
    span = 2.0 * r * std::sin(turn_angle);
  }

  double offset_at(double xi) const {
    xi = std::clamp(xi, 0.0, span);
    if (xi <= 0.5 * span) return radius - std::sqrt(radius * radius - xi * xi);
    const double u = span - xi;
    return shift - (radius - std::sqrt(radius * radius - u * u));
  }

  /// Longitudinal distance at which the lateral offset first reaches q (0 <= q <= shift).
  double reach(double q) const {
    q = std::clamp(q, 0.0, shift);
    if (q <= 0.5 * shift) {
      const double c = radius - q;
      return std::sqrt(std::max(0.0, radius * radius - c * c));
    }
    const double c = radius - (shift - q);
    return span - std::sqrt(std::max(0.0, radius * radius - c * c));
  }
};

/// Constant-speed time-of-arrival model for the ego along X.
struct ArrivalModel {
  double x_ref = 0.0;
  double t_ref = 0.0;
  double speed = 10.0;

  double time_at(double x) const { return t_ref + (x - x_ref) / speed; }
};

struct PlanningOptions {
  double path_margin = 1.0;     // extra inflation of obstacle boundaries while planning [m]
  double length_factor = 1.5;   // path covers length_factor * vx * duration beyond the start
  double extra_length = 40.0;   // ... plus this [m]
  double interval_step = 0.25;  // sampling step for moving-obstacle blockage intervals [m]
};

/// Part of a lane that the ego may not occupy at its predicted arrival time.
struct Blockage {
  std::string obstacle;
  double x_lo = 0.0;
  double x_hi = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
};

/// X-intervals in [x_from, x_to] where an ego at constant speed would overlap the
/// obstacle's planning rectangle longitudinally.
inline std::vector<Blockage> blockages_for(const Obstacle& o, const ArrivalModel& arrival,
                                           double x_from, double x_to, const PlanningOptions& opt) {
  const double hx = 0.5 * o.length + o.safety_gap + opt.path_margin;
  const double hy = 0.5 * o.width + o.safety_gap + opt.path_margin;
  auto make = [&](double lo, double hi) {
    return Blockage{o.name, lo, hi, o.y0 - hy, o.y0 + hy};
  };
  std::vector<Blockage> out;
  if (o.is_static()) {
    const double lo = std::max(o.x0 - hx, x_from);
    const double hi = std::min(o.x0 + hx, x_to);
    if (lo < hi) out.push_back(make(lo, hi));
    return out;
  }
  auto inside = [&](double x) {
    return std::abs(x - obstacle_pose_at(o, arrival.time_at(x)).x) <= hx;
  };
  auto edge = [&](double a, double b) {  // inside(a) != inside(b)
    const bool ia = inside(a);
    for (int k = 0; k < 80; ++k) {
      const double mid = 0.5 * (a + b);
      (inside(mid) == ia ? a : b) = mid;
    }
    return 0.5 * (a + b);
  };
  const int n = std::max(1, static_cast<int>(std::ceil((x_to - x_from) / opt.interval_step)));
  double prev_x = x_from;
  bool prev_in = inside(prev_x);
  double start = prev_in ? x_from : 0.0;
  for (int k = 1; k <= n; ++k) {
    const double x = k == n ? x_to : x_from + k * (x_to - x_from) / n;
    const bool in = inside(x);
    if (in != prev_in) {
      const double e = edge(prev_x, x);
      if (in) {
        start = e;
      } else {
        out.push_back(make(start, e));
      }
    }
    prev_x = x;
    prev_in = in;
  }
  if (prev_in) out.push_back(make(start, x_to));
  return out;
}

namespace detail {

struct LaneSwitch {
  double x_start;
  int from_lane;
  int to_lane;
};

struct LaneBlock {
  double lo;
  double hi;
  double depth;  // lateral extent into the lane gap, measured from this lane's centreline
  std::string obstacle;
};

/// Greedy lane plan: stay in `home` lane, detour through `other` around home-lane
/// blockages, return as soon as the trailing edge allows.
inline std::vector<LaneSwitch> plan_switches(const std::vector<LaneBlock>& home_blocks,
                                             const std::vector<LaneBlock>& other_blocks,
                                             const LaneChangeShape& S, int home, int other,
                                             double x_start) {
  const double h = S.shift;
  std::vector<LaneSwitch> switches;
  double cursor = x_start;
  bool in_home = true;
  for (int guard = 0; guard < 1000; ++guard) {
    if (in_home) {
      double upper = std::numeric_limits<double>::infinity();
      std::string culprit;
      for (const auto& b : home_blocks) {
        if (b.hi <= cursor) continue;
        const double bound = b.lo - S.reach(b.depth);
        if (bound < upper) {
          upper = bound;
          culprit = b.obstacle;
        }
      }
      if (!std::isfinite(upper)) break;
      double lower = cursor;
      for (const auto& b : other_blocks)
        if (b.hi > cursor && b.lo < upper + S.span) lower = std::max(lower, b.hi - S.reach(h - b.depth));
      if (lower > upper)
        throw InfeasibleGeometry("no room to leave the lane before obstacle '" + culprit + "'");
      switches.push_back({upper, home, other});
      cursor = upper + S.span;
      in_home = false;
    } else {
      const double entered = switches.back().x_start;
      double ret = cursor;
      for (bool changed = true; changed;) {
        changed = false;
        for (const auto& b : home_blocks) {
          if (b.hi <= entered) continue;
          // Blockages reached before the return completes, or so close behind it
          // that the next departure would have to start before the return ends.
          const bool overlaps = b.lo < ret + S.span;
          const bool no_room = b.lo - S.reach(b.depth) < ret + S.span;
          if (!(overlaps || no_room)) continue;
          const double need = b.hi - S.reach(h - b.depth);
          if (need > ret) {
            ret = need;
            changed = true;
          }
        }
      }
      for (const auto& b : other_blocks) {
        if (b.hi <= entered + S.reach(h - b.depth)) continue;  // cleared while entering
        if (b.lo < ret + S.reach(b.depth))
          throw InfeasibleGeometry("obstacle '" + b.obstacle +
                                   "' blocks the adjacent lane during the detour");
      }
      switches.push_back({ret, other, home});
      cursor = ret + S.span;
      in_home = true;
    }
  }
  return switches;
}

}  // namespace detail

/// Builds the lane-change reference path with obstacle timing from `arrival`.
/// Arcs use the minimum turn radius at `vx`.
inline ReferencePath build_lane_change_path(const Scenario& sc, const ArrivalModel& arrival,
                                            double vx, const VehicleParams& params,
                                            const PlanningOptions& opt = {}) {
  const Road& road = sc.road;
  const int home = road.lane_of(sc.ego_initial.Y);
  const double x_start = sc.ego_initial.X;
  double x_end = x_start + opt.length_factor * sc.ego_initial.vx * sc.duration + opt.extra_length;
  const double R = min_turn_radius(vx, params);
  const double y_home = road.centreline_y(home);

  ReferencePath path;
  path.radius = R;
  path.design_speed = vx;

  // Moving obstacles are only checked from one lane change behind the ego on:
  // further back, the arrival model would map X to times the ego never saw there.
  const double x_recent = std::max(x_start, arrival.x_ref - 2.0 * R);
  std::vector<Blockage> all;
  for (const auto& o : sc.obstacles)
    for (auto& b : blockages_for(o, arrival, o.is_static() ? x_start : x_recent, x_end, opt))
      all.push_back(std::move(b));

  std::vector<detail::LaneSwitch> switches;
  if (!all.empty()) {
    if (road.n_lanes < 2) {
      for (const auto& b : all)
        if (b.y_min < y_home && y_home < b.y_max)
          throw InfeasibleGeometry("obstacle '" + b.obstacle + "' blocks the only lane");
    } else {
      const int other = home == 0 ? 1 : 0;
      const double y_other = road.centreline_y(other);
      const double dir = y_other > y_home ? 1.0 : -1.0;
      const LaneChangeShape S(R, std::abs(y_other - y_home));
      std::vector<detail::LaneBlock> home_blocks, other_blocks;
      for (const auto& b : all) {
        const bool covers_home = b.y_min < y_home && y_home < b.y_max;
        const bool covers_other = b.y_min < y_other && y_other < b.y_max;
        if (covers_home && covers_other)
          throw InfeasibleGeometry("obstacle '" + b.obstacle + "' blocks both lanes");
        // Depth: how far the blockage reaches from its lane centreline into the gap.
        if (covers_home)
          home_blocks.push_back({b.x_lo, b.x_hi, dir > 0 ? b.y_max - y_home : y_home - b.y_min, b.obstacle});
        if (covers_other)
          other_blocks.push_back({b.x_lo, b.x_hi, dir > 0 ? y_other - b.y_min : b.y_max - y_other, b.obstacle});
      }
      auto by_lo = [](const auto& a, const auto& b) { return a.lo < b.lo; };
      std::sort(home_blocks.begin(), home_blocks.end(), by_lo);
      std::sort(other_blocks.begin(), other_blocks.end(), by_lo);
      switches = detail::plan_switches(home_blocks, other_blocks, S, home, other, x_start);
      if (!switches.empty()) x_end = std::max(x_end, switches.back().x_start + S.span + opt.extra_length);

      // Emit segments.
      Point cur{x_start, y_home};
      path.waypoints.push_back({"P0", cur});
      for (const auto& sw : switches) {
        const double lead = sw.x_start - cur.x;
        if (lead > 0.0) path.append(PathSegment::line(cur, 0.0, lead));
        const Point s0{sw.x_start, cur.y};
        const int turn = road.centreline_y(sw.to_lane) > road.centreline_y(sw.from_lane) ? 1 : -1;
        const PathSegment a1 = PathSegment::arc(s0, 0.0, R, turn, S.turn_angle);
        PathSegment a2 = PathSegment::arc(a1.end, a1.end_heading(), R, -turn, S.turn_angle);
        // Land exactly on the arrival centreline.
        a2.end = {a2.end.x, road.centreline_y(sw.to_lane)};
        path.append(a1);
        path.append(a2);
        const auto label = [&] { return "P" + std::to_string(path.waypoints.size()); };
        path.waypoints.push_back({label(), s0});
        path.waypoints.push_back({label(), a1.end});
        path.waypoints.push_back({label(), a2.end});
        cur = a2.end;
      }
      path.append(PathSegment::line(cur, 0.0, x_end - cur.x));
      path.waypoints.push_back({"P" + std::to_string(path.waypoints.size()),
                                path.segments.back().end});
    }
  }
  if (path.segments.empty()) {
    const Point p0{x_start, y_home};
    path.append(PathSegment::line(p0, 0.0, x_end - x_start));
    path.waypoints.push_back({"P0", p0});
    path.waypoints.push_back({"P1", path.segments.back().end});
  }

  // Final check: no sampled path point inside a blockage at its arrival time.
  for (double s = 0.0; s <= path.total_length; s += 0.05) {
    const PathSample q = sample_reference(path, s);
    if (!road.contains_y(q.Y)) throw InfeasibleGeometry("reference path leaves the road");
    for (const auto& b : all)
      if (q.X > b.x_lo && q.X < b.x_hi && q.Y > b.y_min && q.Y < b.y_max)
        throw InfeasibleGeometry("reference path enters the boundary of obstacle '" + b.obstacle + "'");
  }
  return path;
}

/// Static-timing variant: the ego leaves its initial position at t = 0 with speed vx.
inline ReferencePath build_lane_change_path(const Scenario& sc, double vx, const VehicleParams& params,
                                            const PlanningOptions& opt = {}) {
  return build_lane_change_path(sc, ArrivalModel{sc.ego_initial.X, 0.0, vx}, vx, params, opt);
}

}  // namespace lcmpc
