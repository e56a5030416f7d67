// Command-line simulator: runs a scenario file through the integrated MPC
// and/or the two-level baseline and writes CSV logs.
//
//   lcmpc-sim run --scenario scenarios/static.cfg --controller both --out out/
//
// Exit codes: 0 collision-free, 2 collision, 3 planner/solver/plant abort,
// 1 usage or configuration error.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lcmpc/lcmpc.hpp"
#include "lcmpc/scenario_io.hpp"

namespace fs = std::filesystem;
using namespace lcmpc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCollision = 2;
constexpr int kExitAbort = 3;

struct RunOptions {
  std::string scenario;
  std::string controller = "both";
  std::string out = ".";
  std::vector<std::string> overrides;
  bool dump_path = false;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write '" + path.string() + "'");
  os << content;
  if (!os) throw ConfigError("error while writing '" + path.string() + "'");
}

template <class Fn>
std::string to_text(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

struct Outcome {
  SimulationLog log;
  Metrics metrics;
  bool completed = false;
};

int run_command(const RunOptions& opt) {
  Settings settings;
  ScenarioFile file = load_scenario(opt.scenario, settings);
  for (const auto& o : opt.overrides) apply_override(file.settings, o);
  file.settings.validate();
  const Scenario& sc = file.scenario;
  sc.validate();
  const Settings& st = file.settings;

  std::vector<ControllerKind> kinds;
  if (opt.controller == "integrated" || opt.controller == "both") kinds.push_back(ControllerKind::integrated);
  if (opt.controller == "two_level" || opt.controller == "both") kinds.push_back(ControllerKind::two_level);

  const fs::path out = opt.out;
  fs::create_directories(out);

  ReferencePath path;
  try {
    path = build_lane_change_path(sc, sc.ego_initial.vx, st.vehicle, st.harness.planning);
  } catch (const InfeasibleGeometry& e) {
    std::cerr << "planning failed: " << e.what() << '\n';
    return kExitAbort;
  }
  write_file(out / "reference_path.csv", to_text([&](std::ostream& os) { write_reference_path_csv(os, path); }));
  write_file(out / "waypoints.csv", to_text([&](std::ostream& os) { write_waypoints_csv(os, path); }));
  if (opt.dump_path) {
    std::cout << "path: " << path.waypoints.size() << " waypoints, length "
              << format_double(path.total_length) << " m, radius " << format_double(path.radius) << " m\n";
    return kExitOk;
  }

  // Independent runs share no mutable state.
  std::vector<std::future<Outcome>> jobs;
  for (ControllerKind k : kinds) {
    jobs.push_back(std::async(std::launch::async, [&sc, &st, k] {
      Outcome o;
      o.log = run(sc, st.vehicle, st.mpc, k, st.harness);
      o.metrics = compute_metrics(o.log, st.mpc);
      o.completed = completed_lane_change(o.log, sc);
      return o;
    }));
  }

  int code = kExitOk;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Outcome o = jobs[i].get();
    const std::string name(to_string(kinds[i]));
    write_file(out / ("trajectory_" + name + ".csv"),
               to_text([&](std::ostream& os) { write_trajectory_csv(os, o.log); }));
    write_file(out / ("metrics_" + name + ".csv"),
               to_text([&](std::ostream& os) { write_metrics_csv(os, o.log, o.metrics, o.completed); }));
    std::printf("%s%s: status=%s steps=%zu rms_err=%.4f m max_err=%.4f m min_clearance=%.4f m "
                "yaw_smoothness=%.4f saturation=%.3f lane_change=%s\n",
                name.c_str(), kinds[i] == ControllerKind::two_level ? " (pure-pursuit stand-in)" : "",
                std::string(to_string(o.log.status)).c_str(), o.log.rows.size(), o.metrics.rms_lateral_error,
                o.metrics.max_lateral_error, o.metrics.min_clearance, o.metrics.yaw_smoothness,
                o.metrics.saturation_fraction, o.completed ? "completed" : "not completed");
    if (o.log.status != RunStatus::completed) {
      std::fprintf(stderr, "%s aborted: %s\n", name.c_str(), o.log.error.c_str());
      code = kExitAbort;
    } else if (!o.metrics.collision_free() && code == kExitOk) {
      code = kExitCollision;
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lane-change MPC simulator"};
  app.require_subcommand(1);
  RunOptions opt;
  CLI::App* run_cmd = app.add_subcommand("run", "Simulate a scenario and write CSV logs");
  run_cmd->add_option("--scenario", opt.scenario, "Scenario file (YAML)")->required();
  run_cmd->add_option("--controller", opt.controller, "integrated | two_level | both")
      ->check(CLI::IsMember({"integrated", "two_level", "both"}))
      ->capture_default_str();
  run_cmd->add_option("--out", opt.out, "Output directory")->capture_default_str();
  run_cmd->add_option("--set", opt.overrides, "Override a setting, key=value (repeatable)")
      ->expected(1)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  run_cmd->add_flag("--dump-path", opt.dump_path, "Write only reference_path.csv and waypoints.csv");
  run_cmd->footer(
      "Setting keys: " + [] {
        std::string keys;
        for (const auto& f : setting_fields()) keys += (keys.empty() ? "" : ", ") + f.key;
        return keys;
      }());

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    return run_command(opt);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
