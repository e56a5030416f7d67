#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "support.hpp"

using namespace lcmpc;

namespace {

std::string error_of(const std::string& yaml) {
  try {
    parse_scenario(yaml);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::string trajectory_text(const SimulationLog& log) {
  std::ostringstream os;
  write_trajectory_csv(os, log);
  return os.str();
}

}  // namespace

TEST(ScenarioFile, FullDocument) {
  const ScenarioFile f = parse_scenario(R"(
name: test
duration: 7.5
road: {lane_width: 3.6, n_lanes: 2, lower_boundary_y: -1.8}
ego: {vx: 12, vy: 0.1, r: 0.01, X: 2, Y: 0.2, psi: 0.05}
obstacles:
  - {name: a, x: 30, y: 0}
  - name: b
    x: 50
    y: 3.6
    length: 4.5
    width: 2.0
    safety_gap: 0.4
    initial_speed: 8
    target_speed: 9
    acceleration: 0.25
settings:
  mpc.b3: 0.5
  vehicle.mu: 0.7
  mpc.yaw_accel: centered
)");
  const Scenario& sc = f.scenario;
  EXPECT_EQ(sc.name, "test");
  EXPECT_EQ(sc.duration, 7.5);
  EXPECT_EQ(sc.road.lane_width, 3.6);
  EXPECT_EQ(sc.road.lower_boundary_y, -1.8);
  EXPECT_EQ(sc.ego_initial, (VehicleState{12, 0.1, 0.01, 2, 0.2, 0.05}));
  ASSERT_EQ(sc.obstacles.size(), 2u);
  EXPECT_EQ(sc.obstacles[0].length, 4.0);
  EXPECT_EQ(sc.obstacles[0].safety_gap, 0.5);
  EXPECT_TRUE(sc.obstacles[0].is_static());
  EXPECT_EQ(sc.obstacles[1].width, 2.0);
  EXPECT_EQ(sc.obstacles[1].speed.target_speed, 9.0);
  EXPECT_EQ(sc.obstacles[1].speed.acceleration, 0.25);
  EXPECT_EQ(f.settings.mpc.b3, 0.5);
  EXPECT_EQ(f.settings.vehicle.mu, 0.7);
  EXPECT_EQ(f.settings.mpc.yaw_accel, YawAccelScheme::centered);
  EXPECT_NO_THROW(sc.validate());
}

TEST(ScenarioFile, BaseSettingsSurviveUnlessOverridden) {
  Settings base;
  base.mpc.a1 = 3.0;
  base.mpc.b3 = 2.0;
  const ScenarioFile f = parse_scenario("settings: {mpc.b3: 0.25}\n", base);
  EXPECT_EQ(f.settings.mpc.a1, 3.0);
  EXPECT_EQ(f.settings.mpc.b3, 0.25);
}

TEST(ScenarioFile, StrictKeys) {
  EXPECT_NE(error_of("road: {foo: 1}").find("road.foo"), std::string::npos);
  EXPECT_NE(error_of("colour: red").find("colour"), std::string::npos);
  EXPECT_NE(error_of("obstacles: [{name: a, x: 1, y: 0, mass: 3}]").find("obstacles[0].mass"), std::string::npos);
  EXPECT_NE(error_of("obstacles: [{name: a, y: 0}]").find("obstacles[0].x"), std::string::npos);
  EXPECT_NE(error_of("settings: {mpc.zz: 1}").find("settings.mpc.zz"), std::string::npos);
  EXPECT_NE(error_of("ego: {vx: fast}").find("ego.vx"), std::string::npos);
  EXPECT_NE(error_of("road: {n_lanes: 1.5}").find("road.n_lanes"), std::string::npos);
  EXPECT_FALSE(error_of("obstacles: {a: 1}").empty());
  EXPECT_FALSE(error_of("").empty());
  EXPECT_FALSE(error_of("road: [1, 2").empty());
}

TEST(ScenarioFile, MissingFileNamesPath) {
  try {
    load_scenario("/nonexistent/dir/scenario.cfg");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/scenario.cfg"), std::string::npos);
  }
}

TEST(ScenarioFile, ShippedScenarios) {
  const Scenario st = lcmpc::test::static_set();
  const Scenario dy = lcmpc::test::dynamic_set();
  EXPECT_NO_THROW(st.validate());
  EXPECT_NO_THROW(dy.validate());
  EXPECT_EQ(st.obstacles.size(), 3u);
  EXPECT_EQ(dy.obstacles.size(), 3u);
  EXPECT_EQ(st.ego_initial.vx, 10.0);
  for (const auto& o : st.obstacles) EXPECT_TRUE(o.is_static());
  const double targets[] = {10.5, 12.0, 11.5};
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(dy.obstacles[i].speed.target_speed, targets[i]);
}

TEST(Csv, ShortestRoundTripNumbers) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e22, 0.0, 123456.789, std::nextafter(1.0, 2.0)})
    EXPECT_EQ(parse_double(format_double(v)), v);
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(10.0), "10");
  EXPECT_THROW(parse_double("1.0abc"), ConfigError);
}

TEST(Csv, TrajectoryRoundTripIsExact) {
  const SimulationLog log = run(lcmpc::test::static_set(), {}, {}, ControllerKind::integrated);
  const std::string text = trajectory_text(log);
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,vx,vy,r,X,Y,psi,delta_f,Tr,J,Xd,Yd,clearance,converged");
  std::istringstream is(text);
  const std::vector<LogRow> rows = read_trajectory_csv(is);
  ASSERT_EQ(rows.size(), log.rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const LogRow &a = rows[k], &b = log.rows[k];
    ASSERT_EQ(a.t, b.t);
    ASSERT_EQ(a.state, b.state);
    ASSERT_EQ(a.u, b.u);
    ASSERT_EQ(a.J, b.J);
    ASSERT_EQ(a.Xd, b.Xd);
    ASSERT_EQ(a.Yd, b.Yd);
    ASSERT_EQ(a.clearance, b.clearance);
    ASSERT_EQ(a.converged, b.converged);
  }
}

TEST(Csv, InfiniteClearanceRoundTrips) {
  const SimulationLog log = run(lcmpc::test::empty_road(2.0), {}, {}, ControllerKind::two_level);
  std::istringstream is(trajectory_text(log));
  const auto rows = read_trajectory_csv(is);
  ASSERT_FALSE(rows.empty());
  EXPECT_TRUE(std::isinf(rows[0].clearance));
}

TEST(Csv, RejectsMalformedTrajectory) {
  std::istringstream empty("");
  EXPECT_THROW(read_trajectory_csv(empty), ConfigError);
  std::istringstream header("t,vx\n");
  EXPECT_THROW(read_trajectory_csv(header), ConfigError);
  std::istringstream short_row("t,vx,vy,r,X,Y,psi,delta_f,Tr,J,Xd,Yd,clearance,converged\n1,2,3\n");
  EXPECT_THROW(read_trajectory_csv(short_row), ConfigError);
}

TEST(Csv, RepeatedRunsAreByteIdentical) {
  const Scenario sc = lcmpc::test::dynamic_set();
  const std::string a = trajectory_text(run(sc, {}, {}, ControllerKind::integrated));
  const std::string b = trajectory_text(run(sc, {}, {}, ControllerKind::integrated));
  EXPECT_EQ(a, b);
}

TEST(Csv, MetricsAndGeometryFiles) {
  const Scenario sc = lcmpc::test::static_set();
  const SimulationLog log = run(sc, {}, {}, ControllerKind::two_level);
  std::ostringstream m;
  write_metrics_csv(m, log, compute_metrics(log, MpcConfig{}), completed_lane_change(log, sc));
  std::istringstream lines(m.str());
  std::string header, values;
  std::getline(lines, header);
  std::getline(lines, values);
  EXPECT_EQ(header.rfind("controller,status,", 0), 0u);
  EXPECT_EQ(values.rfind("two_level,completed,", 0), 0u);

  std::ostringstream p, w;
  write_reference_path_csv(p, log.initial_path);
  write_waypoints_csv(w, log.initial_path);
  EXPECT_EQ(p.str().rfind("s,X,Y,heading,curvature\n0,0,0,0,0\n", 0), 0u);
  EXPECT_EQ(w.str().rfind("label,X,Y\nP0,0,0\n", 0), 0u);
}
