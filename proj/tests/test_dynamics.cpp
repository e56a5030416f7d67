#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"

using namespace lcmpc;

namespace {

double max_state_diff(const VehicleState& a, const VehicleState& b) {
  return std::max({std::abs(a.vx - b.vx), std::abs(a.vy - b.vy), std::abs(a.r - b.r),
                   std::abs(a.X - b.X), std::abs(a.Y - b.Y), std::abs(a.psi - b.psi)});
}

VehicleState simulate(VehicleState s, ControlInput u, double dt, double T, const VehicleParams& p = {}) {
  const int n = static_cast<int>(std::llround(T / dt));
  for (int i = 0; i < n; ++i) s = step(s, u, p, dt);
  return s;
}

}  // namespace

TEST(SlipAngles, StraightLineIsZero) {
  const SlipAngles a = slip_angles({10, 0, 0, 0, 0, 0}, 0.0, {});
  EXPECT_EQ(a.front, 0.0);
  EXPECT_EQ(a.rear, 0.0);
}

TEST(SlipAngles, HandEvaluated) {
  const SlipAngles a = slip_angles({10, 0.5, 0.1, 0, 0, 0}, 0.05, {});
  EXPECT_NEAR(a.front, 0.012, 1e-15);
  EXPECT_NEAR(a.rear, 0.0395, 1e-15);
}

TEST(SlipAngles, PureSteeringOffset) {
  const SlipAngles a = slip_angles({10, 0, 0, 0, 0, 0}, 0.1, {});
  EXPECT_DOUBLE_EQ(a.front, -0.1);
  EXPECT_EQ(a.rear, 0.0);
}

TEST(SlipAngles, RejectsLowSpeed) {
  EXPECT_THROW(slip_angles({0.0, 0, 0, 0, 0, 0}, 0.0, {}), SingularSlipError);
  EXPECT_THROW(slip_angles({0.05, 0, 0, 0, 0, 0}, 0.0, {}), SingularSlipError);
  EXPECT_THROW(slip_angles({-3.0, 0, 0, 0, 0, 0}, 0.0, {}), SingularSlipError);
  EXPECT_NO_THROW(slip_angles({0.1, 0, 0, 0, 0, 0}, 0.0, {}));
}

TEST(TireForces, Examples) {
  const VehicleParams p;
  TireForces f = lateral_tire_forces({0.0, 0.0}, p);
  EXPECT_EQ(f.front, 0.0);
  EXPECT_EQ(f.rear, 0.0);
  f = lateral_tire_forces({0.01, 0.01}, p);
  EXPECT_DOUBLE_EQ(f.front, -120.0);
  EXPECT_DOUBLE_EQ(f.rear, -120.0);
  f = lateral_tire_forces({-0.01, 0.02}, p);
  EXPECT_DOUBLE_EQ(f.front, 120.0);
  EXPECT_DOUBLE_EQ(f.rear, -240.0);
}

TEST(TireForces, LinearInSlipInputs) {
  const VehicleParams p;
  auto forces = [&](double vy, double r, double d) {
    return lateral_tire_forces(slip_angles({10.0, vy, r, 0, 0, 0}, d, p), p);
  };
  const TireForces a = forces(0.3, -0.05, 0.02), b = forces(-0.1, 0.2, -0.04);
  const TireForces ab = forces(0.3 - 2.0 * 0.1, -0.05 + 2.0 * 0.2, 0.02 - 2.0 * 0.04);
  EXPECT_NEAR(ab.front, a.front + 2.0 * b.front, 1e-9);
  EXPECT_NEAR(ab.rear, a.rear + 2.0 * b.rear, 1e-9);
}

TEST(StateDerivative, ForceFreeStraightMotion) {
  const StateRate d = state_derivative({10, 0, 0, 0, 0, 0}, {0.0, 0.0}, {});
  EXPECT_EQ(d.vx, 0.0);
  EXPECT_EQ(d.vy, 0.0);
  EXPECT_EQ(d.r, 0.0);
  EXPECT_EQ(d.X, 10.0);
  EXPECT_EQ(d.Y, 0.0);
  EXPECT_EQ(d.psi, 0.0);
}

TEST(StateDerivative, DriveTorqueAccelerates) {
  const StateRate d = state_derivative({10, 0, 0, 0, 0, 0}, {0.0, 100.0}, {});
  EXPECT_NEAR(d.vx, (2.0 / 2000.0) * (100.0 / 0.3), 1e-15);
  EXPECT_GT(d.vx, 0.0);
}

TEST(StateDerivative, HeadingRotatesVelocity) {
  const StateRate d = state_derivative({10, 0, 0, 0, 0, std::numbers::pi / 2}, {0.0, 0.0}, {});
  EXPECT_NEAR(d.X, 0.0, 1e-12);
  EXPECT_NEAR(d.Y, 10.0, 1e-12);
}

TEST(Step, StraightLineAdvancesOneMetre) {
  const VehicleState s = step({10, 0, 0, 0, 0, 0}, {0.0, 0.0}, {}, 0.1);
  EXPECT_NEAR(s.X, 1.0, 1e-15);
  EXPECT_EQ(s.vx, 10.0);
  EXPECT_EQ(s.vy, 0.0);
  EXPECT_EQ(s.r, 0.0);
  EXPECT_EQ(s.Y, 0.0);
  EXPECT_EQ(s.psi, 0.0);
}

TEST(Step, ZeroStepIsIdentity) {
  const VehicleState s{9.0, 0.3, -0.1, 4.0, 1.0, 0.2};
  const VehicleState out = step(s, {0.1, 50.0}, {}, 0.0);
  EXPECT_EQ(out.vx, s.vx);
  EXPECT_EQ(out.vy, s.vy);
  EXPECT_EQ(out.r, s.r);
  EXPECT_EQ(out.X, s.X);
  EXPECT_EQ(out.Y, s.Y);
  EXPECT_EQ(out.psi, s.psi);
}

TEST(Step, ZeroInputStraightLineForManySteps) {
  VehicleState s{10, 0, 0, 0, 0, 0};
  for (int k = 1; k <= 1000; ++k) {
    s = step(s, {0.0, 0.0}, {}, 0.1);
    ASSERT_EQ(s.vx, 10.0);
    ASSERT_EQ(s.vy, 0.0);
    ASSERT_EQ(s.r, 0.0);
    ASSERT_EQ(s.Y, 0.0);
    ASSERT_EQ(s.psi, 0.0);
    ASSERT_NEAR(s.X, k * 1.0, 1e-9 * k);
  }
}

TEST(Step, MatchesFineReferenceIntegration) {
  const VehicleState coarse = simulate({10, 0, 0, 0, 0, 0}, {0.05, 0.0}, 0.01, 1.0);
  const VehicleState fine = simulate({10, 0, 0, 0, 0, 0}, {0.05, 0.0}, 1e-5, 1.0);
  EXPECT_LT(max_state_diff(coarse, fine), 1e-4);
}

TEST(Step, FourthOrderConvergence) {
  // Fixed 2 s manoeuvre with a fine-step solution as truth.
  const VehicleState s0{10, 0, 0, 0, 0, 0};
  const ControlInput u{0.04, 80.0};
  const VehicleState truth = simulate(s0, u, 1e-4, 2.0);
  const double e1 = max_state_diff(simulate(s0, u, 0.04, 2.0), truth);
  const double e2 = max_state_diff(simulate(s0, u, 0.02, 2.0), truth);
  EXPECT_GE(e1 / e2, 8.0) << "e(dt)=" << e1 << " e(dt/2)=" << e2;
}

TEST(Step, RejectsNegativeStep) {
  EXPECT_THROW(step({10, 0, 0, 0, 0, 0}, {}, {}, -0.1), ConfigError);
}

TEST(Step, LowSpeedIsPlantFailure) {
  EXPECT_THROW(step({0.05, 0, 0, 0, 0, 0}, {}, {}, 0.1), PlantFailure);
  // Hard braking from a crawl drives vx below the floor.
  EXPECT_THROW(simulate({0.5, 0, 0, 0, 0, 0}, {0.0, -160.0}, 0.1, 2.0), PlantFailure);
}

TEST(Step, MirrorSymmetry) {
  VehicleState a{10, 0.1, 0.05, 0, 0.4, 0.02}, b = mirrored(a);
  const VehicleParams p;
  for (int k = 0; k < 50; ++k) {
    const ControlInput u{0.03 * std::sin(0.2 * k), 40.0};
    a = step(a, u, p, 0.1);
    b = step(b, mirrored(u), p, 0.1);
    const VehicleState ma = mirrored(a);
    ASSERT_EQ(ma.vx, b.vx);
    ASSERT_EQ(ma.vy, b.vy);
    ASSERT_EQ(ma.r, b.r);
    ASSERT_EQ(ma.X, b.X);
    ASSERT_EQ(ma.Y, b.Y);
    ASSERT_EQ(ma.psi, b.psi);
  }
}

TEST(VehicleParams, DefaultsAndValidation) {
  VehicleParams p;
  EXPECT_EQ(p.m, 2000.0);
  EXPECT_EQ(p.Iz, 1300.0);
  EXPECT_EQ(p.Caf, 12000.0);
  EXPECT_EQ(p.Car, 12000.0);
  EXPECT_NO_THROW(p.validate());
  p.mu = 2.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.Iz = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
}
