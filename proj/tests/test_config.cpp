#include <gtest/gtest.h>

#include <set>
#include <string>

#include "lcmpc/config.hpp"

using namespace lcmpc;

namespace {

const std::set<std::string> kExpectedKeys = {
    "vehicle.m", "vehicle.Iz", "vehicle.lf", "vehicle.lr", "vehicle.Caf", "vehicle.Car",
    "vehicle.Rw", "vehicle.mu", "vehicle.g",
    "mpc.Np", "mpc.dt", "mpc.a1", "mpc.b1", "mpc.b2", "mpc.b3", "mpc.delta_max", "mpc.Td_max",
    "mpc.Tb_max", "mpc.obstacle_weight", "mpc.predictor_yaw_divisor", "mpc.yaw_accel",
    "mpc.solver.grad_tol", "mpc.solver.f_tol", "mpc.solver.max_iter", "mpc.solver.fd_step",
    "mpc.solver.pattern_step", "mpc.solver.pattern_tol", "mpc.solver.max_pattern_sweeps",
    "planning.path_margin", "planning.length_factor", "planning.extra_length", "planning.interval_step",
    "baseline.lookahead_time", "baseline.min_lookahead", "baseline.speed_gain",
    "harness.max_consecutive_fallbacks"};

double read(const SettingField& f, const Settings& s) {
  Settings copy = s;
  switch (f.kind) {
    case FieldKind::real: return f.real(copy);
    case FieldKind::integer: return f.integer(copy);
    case FieldKind::choice: return f.get_choice(s);
  }
  return 0.0;
}

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Settings, KeySetIsExactlyTheDocumentedOne) {
  std::set<std::string> keys;
  for (const auto& f : setting_fields()) EXPECT_TRUE(keys.insert(f.key).second) << "duplicate " << f.key;
  EXPECT_EQ(keys, kExpectedKeys);
}

TEST(Settings, EveryKeySetsOnlyItsOwnField) {
  for (const auto& target : setting_fields()) {
    Settings s;
    const Settings before = s;
    std::string value;
    double expected = 0.0;
    switch (target.kind) {
      case FieldKind::real:
        expected = read(target, before) * 1.5 + 0.25;
        value = std::to_string(expected);
        expected = std::stod(value);
        break;
      case FieldKind::integer:
        expected = read(target, before) + 7;
        value = std::to_string(static_cast<int>(expected));
        break;
      case FieldKind::choice: {
        const int next = (static_cast<int>(read(target, before)) + 1) % static_cast<int>(target.choices.size());
        value = target.choices[static_cast<std::size_t>(next)];
        expected = next;
        break;
      }
    }
    apply_override(s, target.key + "=" + value);
    EXPECT_EQ(read(target, s), expected) << target.key;
    for (const auto& other : setting_fields()) {
      if (other.key == target.key) continue;
      EXPECT_EQ(read(other, s), read(other, before)) << target.key << " changed " << other.key;
    }
  }
}

TEST(Settings, TypedAccess) {
  Settings s;
  apply_override(s, "vehicle.mu=0.8");
  apply_override(s, " mpc.Np = 5 ");
  apply_override(s, "mpc.yaw_accel=backward");
  apply_override(s, "mpc.predictor_yaw_divisor=mass");
  apply_override(s, "mpc.b3=+1e-2");
  EXPECT_EQ(s.vehicle.mu, 0.8);
  EXPECT_EQ(s.mpc.Np, 5);
  EXPECT_EQ(s.mpc.yaw_accel, YawAccelScheme::backward);
  EXPECT_EQ(s.mpc.predictor_yaw_divisor, YawDivisor::mass);
  EXPECT_EQ(s.mpc.b3, 1e-2);
  EXPECT_NO_THROW(s.validate());
}

TEST(Settings, ErrorsNameTheKey) {
  Settings s;
  EXPECT_NE(error_of([&] { apply_override(s, "mpc.a9=1"); }).find("mpc.a9"), std::string::npos);
  EXPECT_NE(error_of([&] { apply_override(s, "vehicle.m=heavy"); }).find("vehicle.m"), std::string::npos);
  EXPECT_NE(error_of([&] { apply_override(s, "mpc.Np=2.5"); }).find("mpc.Np"), std::string::npos);
  EXPECT_NE(error_of([&] { apply_override(s, "mpc.yaw_accel=sideways"); }).find("mpc.yaw_accel"),
            std::string::npos);
  for (const char* bad : {"mpc.b1=nan", "mpc.b1=inf", "mpc.b1=1e999", "mpc.b1=", "mpc.b1=1.0x", "mpc.b1"})
    EXPECT_THROW(apply_override(s, bad), ConfigError) << bad;
  EXPECT_EQ(s.mpc.b1, MpcConfig{}.b1);
}

TEST(Settings, ValidateRejectsOutOfRange) {
  for (const char* o : {"mpc.Np=0", "mpc.dt=0", "vehicle.mu=2", "vehicle.m=-1", "mpc.Td_max=0",
                        "planning.interval_step=0", "harness.max_consecutive_fallbacks=0"}) {
    Settings s;
    apply_override(s, o);
    EXPECT_THROW(s.validate(), ConfigError) << o;
  }
}
