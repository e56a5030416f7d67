#pragma once

/**
 * @file csv.hpp
 * @brief CSV output of runs, metrics and path geometry.
 *
 * Numbers are written in the shortest form that parses back to the same
 * double, so a trajectory file re-read with read_trajectory_csv reproduces the
 * logged rows exactly.
 *
 * Trajectory columns:
 *   t, vx, vy, r, X, Y, psi, delta_f, Tr, J, Xd, Yd, clearance, converged
 */

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lcmpc/dubins.hpp"
#include "lcmpc/errors.hpp"
#include "lcmpc/harness.hpp"

namespace lcmpc {

inline constexpr std::array<std::string_view, 14> kTrajectoryColumns = {
    "t", "vx", "vy", "r", "X", "Y", "psi", "delta_f", "Tr", "J", "Xd", "Yd", "clearance", "converged"};

/// Shortest round-trip decimal representation.
inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ConfigError("bad number '" + std::string(s) + "' in CSV");
  return v;
}

namespace detail {

template <class Range>
void write_row(std::ostream& os, const Range& cells) {
  bool first = true;
  for (const auto& c : cells) {
    if (!first) os << ',';
    os << c;
    first = false;
  }
  os << '\n';
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

inline void write_trajectory_csv(std::ostream& os, const SimulationLog& log) {
  detail::write_row(os, kTrajectoryColumns);
  for (const auto& r : log.rows) {
    const std::array<std::string, 14> cells = {
        format_double(r.t),         format_double(r.state.vx), format_double(r.state.vy),
        format_double(r.state.r),   format_double(r.state.X),  format_double(r.state.Y),
        format_double(r.state.psi), format_double(r.u.delta_f), format_double(r.u.Tr),
        format_double(r.J),         format_double(r.Xd),       format_double(r.Yd),
        format_double(r.clearance), r.converged ? "1" : "0"};
    detail::write_row(os, cells);
  }
}

inline std::vector<LogRow> read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("trajectory CSV is empty");
  const auto header = detail::split(line);
  if (header.size() != kTrajectoryColumns.size() ||
      !std::equal(header.begin(), header.end(), kTrajectoryColumns.begin()))
    throw ConfigError("trajectory CSV header does not match the expected columns");
  std::vector<LogRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto c = detail::split(line);
    if (c.size() != kTrajectoryColumns.size())
      throw ConfigError("trajectory CSV row has " + std::to_string(c.size()) + " cells");
    LogRow r;
    r.t = parse_double(c[0]);
    r.state = {parse_double(c[1]), parse_double(c[2]), parse_double(c[3]),
               parse_double(c[4]), parse_double(c[5]), parse_double(c[6])};
    r.u = {parse_double(c[7]), parse_double(c[8])};
    r.J = parse_double(c[9]);
    r.Xd = parse_double(c[10]);
    r.Yd = parse_double(c[11]);
    r.clearance = parse_double(c[12]);
    if (c[13] != "0" && c[13] != "1") throw ConfigError("converged flag must be 0 or 1");
    r.converged = c[13] == "1";
    rows.push_back(r);
  }
  return rows;
}

inline std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return "completed";
    case RunStatus::plant_failure: return "plant_failure";
    case RunStatus::solver_failure: return "solver_failure";
    case RunStatus::planning_failure: return "planning_failure";
  }
  return "unknown";
}

/// One header line and one value line.
inline void write_metrics_csv(std::ostream& os, const SimulationLog& log, const Metrics& m,
                              bool lane_change_completed) {
  os << "controller,status,rms_lateral_error,max_lateral_error,min_clearance,yaw_smoothness,"
        "saturation_fraction,samples,collision_free,lane_change_completed,replans,failed_replans\n";
  os << to_string(log.controller) << ',' << to_string(log.status) << ','
     << format_double(m.rms_lateral_error) << ',' << format_double(m.max_lateral_error) << ','
     << format_double(m.min_clearance) << ',' << format_double(m.yaw_smoothness) << ','
     << format_double(m.saturation_fraction) << ',' << m.samples << ','
     << (m.collision_free() ? 1 : 0) << ',' << (lane_change_completed ? 1 : 0) << ','
     << log.replans << ',' << log.failed_replans << '\n';
}

/// Dense samples of the path: s, X, Y, heading, curvature.
inline void write_reference_path_csv(std::ostream& os, const ReferencePath& path, double ds = 0.25) {
  os << "s,X,Y,heading,curvature\n";
  if (path.segments.empty()) return;
  const auto n = static_cast<std::size_t>(std::ceil(path.total_length / ds));
  for (std::size_t i = 0; i <= n; ++i) {
    const double s = std::min(static_cast<double>(i) * ds, path.total_length);
    const PathSample q = sample_reference(path, s);
    os << format_double(s) << ',' << format_double(q.X) << ',' << format_double(q.Y) << ','
       << format_double(q.heading) << ',' << format_double(q.curvature) << '\n';
  }
}

inline void write_waypoints_csv(std::ostream& os, const ReferencePath& path) {
  os << "label,X,Y\n";
  for (const auto& w : path.waypoints)
    os << w.label << ',' << format_double(w.p.x) << ',' << format_double(w.p.y) << '\n';
}

}  // namespace lcmpc
