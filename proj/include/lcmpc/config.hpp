#pragma once

/**
 * @file config.hpp
 * @brief Named settings and `key=value` overrides.
 *
 * Every numeric field of VehicleParams and MpcConfig (solver options included)
 * is reachable by a dotted key such as `vehicle.mu` or `mpc.a1`, together with
 * the planner and baseline options. Enumerations take their lower-case names.
 * Unknown keys and malformed values raise ConfigError naming the key.
 */

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "lcmpc/dynamics.hpp"
#include "lcmpc/errors.hpp"
#include "lcmpc/harness.hpp"
#include "lcmpc/mpc.hpp"

namespace lcmpc {

struct Settings {
  VehicleParams vehicle;
  MpcConfig mpc;
  HarnessOptions harness;

  void validate() const {
    vehicle.validate();
    mpc.validate();
    if (!(harness.planning.interval_step > 0.0)) throw ConfigError("'planning.interval_step' must be > 0");
    if (harness.planning.path_margin < 0.0) throw ConfigError("'planning.path_margin' must be >= 0");
    if (!(harness.baseline.min_lookahead > 0.0)) throw ConfigError("'baseline.min_lookahead' must be > 0");
    if (harness.max_consecutive_fallbacks < 1)
      throw ConfigError("'harness.max_consecutive_fallbacks' must be >= 1");
  }
};

enum class FieldKind { real, integer, choice };

struct SettingField {
  std::string key;
  FieldKind kind = FieldKind::real;
  std::vector<std::string> choices;  // for FieldKind::choice, in enumerator order
  std::function<double&(Settings&)> real;
  std::function<int&(Settings&)> integer;
  std::function<void(Settings&, int)> set_choice;
  std::function<int(const Settings&)> get_choice;
};

namespace detail {

inline SettingField real_field(std::string key, std::function<double&(Settings&)> f) {
  SettingField s;
  s.key = std::move(key);
  s.kind = FieldKind::real;
  s.real = std::move(f);
  return s;
}

inline SettingField int_field(std::string key, std::function<int&(Settings&)> f) {
  SettingField s;
  s.key = std::move(key);
  s.kind = FieldKind::integer;
  s.integer = std::move(f);
  return s;
}

template <class E, class Access>
SettingField enum_field(std::string key, std::vector<std::string> names, Access access) {
  SettingField s;
  s.key = std::move(key);
  s.kind = FieldKind::choice;
  s.choices = std::move(names);
  s.set_choice = [access](Settings& st, int v) { access(st) = static_cast<E>(v); };
  s.get_choice = [access](const Settings& st) {
    Settings copy = st;
    return static_cast<int>(access(copy));
  };
  return s;
}

inline std::vector<SettingField> make_fields() {
  std::vector<SettingField> f;
#define LCMPC_REAL(key, expr) f.push_back(real_field(key, [](Settings& s) -> double& { return s.expr; }))
#define LCMPC_INT(key, expr) f.push_back(int_field(key, [](Settings& s) -> int& { return s.expr; }))
  LCMPC_REAL("vehicle.m", vehicle.m);
  LCMPC_REAL("vehicle.Iz", vehicle.Iz);
  LCMPC_REAL("vehicle.lf", vehicle.lf);
  LCMPC_REAL("vehicle.lr", vehicle.lr);
  LCMPC_REAL("vehicle.Caf", vehicle.Caf);
  LCMPC_REAL("vehicle.Car", vehicle.Car);
  LCMPC_REAL("vehicle.Rw", vehicle.Rw);
  LCMPC_REAL("vehicle.mu", vehicle.mu);
  LCMPC_REAL("vehicle.g", vehicle.g);

  LCMPC_INT("mpc.Np", mpc.Np);
  LCMPC_REAL("mpc.dt", mpc.dt);
  LCMPC_REAL("mpc.a1", mpc.a1);
  LCMPC_REAL("mpc.b1", mpc.b1);
  LCMPC_REAL("mpc.b2", mpc.b2);
  LCMPC_REAL("mpc.b3", mpc.b3);
  LCMPC_REAL("mpc.delta_max", mpc.delta_max);
  LCMPC_REAL("mpc.Td_max", mpc.Td_max);
  LCMPC_REAL("mpc.Tb_max", mpc.Tb_max);
  LCMPC_REAL("mpc.obstacle_weight", mpc.obstacle_weight);
  LCMPC_REAL("mpc.solver.grad_tol", mpc.solver.grad_tol);
  LCMPC_REAL("mpc.solver.f_tol", mpc.solver.f_tol);
  LCMPC_INT("mpc.solver.max_iter", mpc.solver.max_iter);
  LCMPC_REAL("mpc.solver.fd_step", mpc.solver.fd_step);
  LCMPC_REAL("mpc.solver.pattern_step", mpc.solver.pattern_step);
  LCMPC_REAL("mpc.solver.pattern_tol", mpc.solver.pattern_tol);
  LCMPC_INT("mpc.solver.max_pattern_sweeps", mpc.solver.max_pattern_sweeps);

  LCMPC_REAL("planning.path_margin", harness.planning.path_margin);
  LCMPC_REAL("planning.length_factor", harness.planning.length_factor);
  LCMPC_REAL("planning.extra_length", harness.planning.extra_length);
  LCMPC_REAL("planning.interval_step", harness.planning.interval_step);
  LCMPC_REAL("baseline.lookahead_time", harness.baseline.lookahead_time);
  LCMPC_REAL("baseline.min_lookahead", harness.baseline.min_lookahead);
  LCMPC_REAL("baseline.speed_gain", harness.baseline.speed_gain);
  LCMPC_INT("harness.max_consecutive_fallbacks", harness.max_consecutive_fallbacks);
#undef LCMPC_REAL
#undef LCMPC_INT

  f.push_back(enum_field<YawDivisor>("mpc.predictor_yaw_divisor", {"inertia", "mass"},
                                     [](Settings& s) -> YawDivisor& { return s.mpc.predictor_yaw_divisor; }));
  f.push_back(enum_field<YawAccelScheme>("mpc.yaw_accel", {"backward", "forward", "centered"},
                                         [](Settings& s) -> YawAccelScheme& { return s.mpc.yaw_accel; }));
  return f;
}

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline const std::vector<SettingField>& setting_fields() {
  static const std::vector<SettingField> fields = detail::make_fields();
  return fields;
}

inline const SettingField* find_setting(std::string_view key) {
  const auto& f = setting_fields();
  const auto it = std::find_if(f.begin(), f.end(), [&](const SettingField& s) { return s.key == key; });
  return it == f.end() ? nullptr : &*it;
}

/// Parses a finite decimal number occupying the whole string.
inline double parse_real(std::string_view text, std::string_view key) {
  text = detail::trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v))
    throw ConfigError("invalid number '" + std::string(text) + "' for key '" + std::string(key) + "'");
  return v;
}

inline int parse_int(std::string_view text, std::string_view key) {
  text = detail::trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
    throw ConfigError("invalid integer '" + std::string(text) + "' for key '" + std::string(key) + "'");
  return v;
}

/// Sets one field by key. Does not validate the resulting settings as a whole.
inline void set_value(Settings& s, std::string_view key, std::string_view value) {
  const SettingField* f = find_setting(key);
  if (!f) throw ConfigError("unknown setting '" + std::string(key) + "'");
  switch (f->kind) {
    case FieldKind::real:
      f->real(s) = parse_real(value, key);
      return;
    case FieldKind::integer:
      f->integer(s) = parse_int(value, key);
      return;
    case FieldKind::choice: {
      const std::string_view v = detail::trim(value);
      const auto it = std::find(f->choices.begin(), f->choices.end(), v);
      if (it == f->choices.end()) {
        std::string allowed;
        for (const auto& c : f->choices) allowed += (allowed.empty() ? "" : "|") + c;
        throw ConfigError("invalid value '" + std::string(v) + "' for key '" + std::string(key) +
                          "' (expected " + allowed + ")");
      }
      f->set_choice(s, static_cast<int>(it - f->choices.begin()));
      return;
    }
  }
}

/// Applies one `key=value` assignment.
inline void apply_override(Settings& s, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError("override '" + std::string(assignment) + "' is not of the form key=value");
  set_value(s, detail::trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

}  // namespace lcmpc
