#pragma once

/**
 * @file mpc.hpp
 * @brief Integrated planner/controller: explicit-Euler bicycle predictor,
 *        potential-field horizon cost and a receding-horizon solve.
 *
 * The decision variables are the front steering angle and rear wheel torque
 * for each of the Np steps. For step i = 1..Np the predictor evaluates, in
 * this order,
 *
 *   - tyre forces from the step i-1 state and control,
 *   - Euler updates of vx, vy, r (rates of the bicycle model) and
 *     psi(i) = psi(i-1) + r(i-1)*dt,
 *   - global velocities from the updated body velocities and heading,
 *   - Euler position update x(i) = x(i-1) + vxg(i)*dt.
 *
 * The cost sums, per step, an attractive term toward the reference point,
 * inverse-fourth-power repulsion from the upper and lower road boundary
 * (taken abreast of the predicted position) and the squared yaw
 * acceleration.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lcmpc/dubins.hpp"
#include "lcmpc/dynamics.hpp"
#include "lcmpc/errors.hpp"
#include "lcmpc/optimize.hpp"
#include "lcmpc/scenario.hpp"

namespace lcmpc {

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

/// Divisor of the predicted yaw-rate update.
enum class YawDivisor {
  inertia,  // (2/Iz)(lf Fcf - lr Fcr), consistent with the plant
  mass,     // divide by m instead, as in one printed form of the predictor
};

/// Finite difference used for the yaw-acceleration penalty. `backward` differences
/// every step against its predecessor, starting from the measured yaw rate;
/// `forward` and `centered` look one step ahead and fall back to backward at the
/// last step.
enum class YawAccelScheme { backward, forward, centered };

struct MpcConfig {
  int Np = 3;
  double dt = 0.1;
  double a1 = 1.0;     // attraction to the reference path
  double b1 = 1e-3;    // repulsion from the upper road boundary
  double b2 = 1e-3;    // repulsion from the lower road boundary
  double b3 = 0.1;     // yaw acceleration
  double delta_max = deg_to_rad(45.0);
  double Td_max = 200.0;
  double Tb_max = 160.0;
  YawDivisor predictor_yaw_divisor = YawDivisor::inertia;
  YawAccelScheme yaw_accel = YawAccelScheme::forward;
  double obstacle_weight = 0.0;  // > 0 adds repulsion from inflated obstacle boundaries
  BoxOptions solver;

  void validate() const {
    if (Np < 1) throw ConfigError("mpc 'Np' must be >= 1");
    if (!(dt > 0.0)) throw ConfigError("mpc 'dt' must be > 0");
    auto nonneg = [](double v, const char* k) {
      if (!(v >= 0.0) || !std::isfinite(v))
        throw ConfigError(std::string("mpc '") + k + "' must be finite and >= 0");
    };
    nonneg(a1, "a1");
    nonneg(b1, "b1");
    nonneg(b2, "b2");
    nonneg(b3, "b3");
    nonneg(obstacle_weight, "obstacle_weight");
    auto pos = [](double v, const char* k) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw ConfigError(std::string("mpc '") + k + "' must be finite and > 0");
    };
    pos(delta_max, "delta_max");
    pos(Td_max, "Td_max");
    pos(Tb_max, "Tb_max");
    if (solver.max_iter < 1) throw ConfigError("mpc 'max_iter' must be >= 1");
  }

  ControlInput clip(ControlInput u) const {
    return {std::clamp(u.delta_f, -delta_max, delta_max), std::clamp(u.Tr, -Tb_max, Td_max)};
  }

  bool within_bounds(const ControlInput& u) const {
    return std::abs(u.delta_f) <= delta_max && u.Tr >= -Tb_max && u.Tr <= Td_max;
  }
};

struct ControlSequence {
  std::vector<ControlInput> u;

  static ControlSequence zeros(int Np) {
    return {std::vector<ControlInput>(static_cast<std::size_t>(Np))};
  }
  std::size_t size() const { return u.size(); }
  friend bool operator==(const ControlSequence&, const ControlSequence&) = default;
};

/// Previous solution advanced by one step, last element repeated.
inline ControlSequence shift_warm_start(const ControlSequence& seq) {
  if (seq.u.empty()) return seq;
  ControlSequence out;
  out.u.assign(seq.u.begin() + 1, seq.u.end());
  out.u.push_back(seq.u.back());
  return out;
}

struct PredictedStep {
  double x = 0.0, y = 0.0;     // predicted global position
  double vx = 0.0, vy = 0.0;   // body velocities
  double r = 0.0, psi = 0.0;
  double Fcf = 0.0, Fcr = 0.0; // forces from the previous step
  double vxg = 0.0, vyg = 0.0; // global velocities

  friend bool operator==(const PredictedStep&, const PredictedStep&) = default;
};

struct PredictedTrajectory {
  double r0 = 0.0;  // measured yaw rate at the start of the horizon
  std::vector<PredictedStep> steps;

  friend bool operator==(const PredictedTrajectory&, const PredictedTrajectory&) = default;
};

/// Non-throwing prediction; empty when the predicted vx drops below the floor.
inline std::optional<PredictedTrajectory> try_predict(const VehicleState& s, const ControlSequence& seq,
                                                      const VehicleParams& p, const MpcConfig& cfg) {
  PredictedTrajectory out;
  out.r0 = s.r;
  out.steps.reserve(seq.size());
  const double dt = cfg.dt;
  const double yaw_div = cfg.predictor_yaw_divisor == YawDivisor::inertia ? p.Iz : p.m;
  double vx = s.vx, vy = s.vy, r = s.r, psi = s.psi, x = s.X, y = s.Y;
  for (const ControlInput& u : seq.u) {
    if (!(vx >= kMinLongitudinalSpeed)) return std::nullopt;
    PredictedStep k;
    k.Fcf = -p.Caf * ((vy + p.lf * r) / vx - u.delta_f);
    k.Fcr = -p.Car * ((vy - p.lr * r) / vx);
    k.vx = vx + (vy * r - (2.0 / p.m) * (k.Fcf * std::sin(u.delta_f) - u.Tr / p.Rw)) * dt;
    k.vy = vy + (-vx * r + (2.0 / p.m) * (k.Fcf * std::cos(u.delta_f) + k.Fcr)) * dt;
    k.r = r + (2.0 / yaw_div) * (p.lf * k.Fcf - p.lr * k.Fcr) * dt;
    k.psi = psi + r * dt;
    k.vxg = k.vx * std::cos(k.psi) - k.vy * std::sin(k.psi);
    k.vyg = k.vx * std::sin(k.psi) + k.vy * std::cos(k.psi);
    k.x = x + k.vxg * dt;
    k.y = y + k.vyg * dt;
    if (!(k.vx >= kMinLongitudinalSpeed)) return std::nullopt;
    vx = k.vx;
    vy = k.vy;
    r = k.r;
    psi = k.psi;
    x = k.x;
    y = k.y;
    out.steps.push_back(k);
  }
  return out;
}

inline PredictedTrajectory predict(const VehicleState& s, const ControlSequence& seq,
                                   const VehicleParams& p, const MpcConfig& cfg) {
  if (!(s.vx >= kMinLongitudinalSpeed))
    throw SingularSlipError("predictor: measured vx below the 0.1 m/s floor");
  auto traj = try_predict(s, seq, p, cfg);
  if (!traj) throw SingularSlipError("predictor: predicted vx fell below the 0.1 m/s floor");
  return *traj;
}

struct BoundarySamples {
  std::vector<Point> upper;
  std::vector<Point> lower;
};

/// Boundary points abreast of each predicted position.
inline BoundarySamples boundary_samples(const Road& road, const PredictedTrajectory& traj) {
  BoundarySamples b;
  b.upper.reserve(traj.steps.size());
  b.lower.reserve(traj.steps.size());
  for (const auto& k : traj.steps) {
    b.upper.push_back({k.x, road.upper_boundary_y()});
    b.lower.push_back({k.x, road.lower_boundary_y});
  }
  return b;
}

/// Per-term breakdown of the horizon cost.
struct CostTerms {
  double attraction = 0.0;
  double upper_boundary = 0.0;
  double lower_boundary = 0.0;
  double yaw_accel = 0.0;

  double total() const { return attraction + upper_boundary + lower_boundary + yaw_accel; }
};

inline double yaw_acceleration(const PredictedTrajectory& traj, std::size_t i, double dt,
                               YawAccelScheme scheme) {
  const std::size_t n = traj.steps.size();
  auto r_at = [&](std::size_t k) { return k == 0 ? traj.r0 : traj.steps[k - 1].r; };
  const std::size_t k = i + 1;  // horizon index 1..Np
  switch (scheme) {
    case YawAccelScheme::forward:
      if (k < n) return (r_at(k + 1) - r_at(k)) / dt;
      break;
    case YawAccelScheme::centered:
      if (k < n) return (r_at(k + 1) - r_at(k - 1)) / (2.0 * dt);
      break;
    case YawAccelScheme::backward:
      break;
  }
  return (r_at(k) - r_at(k - 1)) / dt;
}

inline CostTerms cost_terms(const PredictedTrajectory& traj, std::span<const Point> refs,
                            const BoundarySamples& bounds, const MpcConfig& cfg) {
  const std::size_t n = traj.steps.size();
  if (refs.size() != n || bounds.upper.size() != n || bounds.lower.size() != n)
    throw ConfigError("cost: trajectory, reference and boundary lengths differ");
  constexpr double inf = std::numeric_limits<double>::infinity();
  CostTerms c;
  for (std::size_t i = 0; i < n; ++i) {
    const PredictedStep& k = traj.steps[i];
    const double ex = k.x - refs[i].x, ey = k.y - refs[i].y;
    c.attraction += cfg.a1 * (ex * ex + ey * ey);
    const double du2 = (k.x - bounds.upper[i].x) * (k.x - bounds.upper[i].x) +
                       (k.y - bounds.upper[i].y) * (k.y - bounds.upper[i].y);
    const double dl2 = (k.x - bounds.lower[i].x) * (k.x - bounds.lower[i].x) +
                       (k.y - bounds.lower[i].y) * (k.y - bounds.lower[i].y);
    if (cfg.b1 > 0.0) c.upper_boundary += du2 > 0.0 ? cfg.b1 / (du2 * du2) : inf;
    if (cfg.b2 > 0.0) c.lower_boundary += dl2 > 0.0 ? cfg.b2 / (dl2 * dl2) : inf;
    const double ra = yaw_acceleration(traj, i, cfg.dt, cfg.yaw_accel);
    c.yaw_accel += cfg.b3 * ra * ra;
  }
  return c;
}

/// Horizon cost; +inf when a predicted point sits exactly on a road boundary.
inline double cost(const PredictedTrajectory& traj, std::span<const Point> refs,
                   const BoundarySamples& bounds, const MpcConfig& cfg) {
  return cost_terms(traj, refs, bounds, cfg).total();
}

/// Optional repulsion from inflated obstacle boundaries at the predicted times.
inline double obstacle_cost(const PredictedTrajectory& traj, const Scenario& sc, double t0,
                            const MpcConfig& cfg) {
  if (cfg.obstacle_weight <= 0.0) return 0.0;
  double c = 0.0;
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    const double t = t0 + static_cast<double>(i + 1) * cfg.dt;
    const Point p{traj.steps[i].x, traj.steps[i].y};
    for (const auto& o : sc.obstacles) {
      const double d = signed_distance(p, obstacle_boundary_at(o, t));
      if (d <= 0.0) return std::numeric_limits<double>::infinity();
      c += cfg.obstacle_weight / (d * d * d * d);
    }
  }
  return c;
}

/// Objective over the flattened decision vector [delta_0, Tr_0, delta_1, Tr_1, ...].
class HorizonObjective {
 public:
  HorizonObjective(const VehicleState& state, const Scenario& sc, std::vector<Point> refs,
                   const VehicleParams& p, const MpcConfig& cfg, double t)
      : state_(state), sc_(sc), refs_(std::move(refs)), p_(p), cfg_(cfg), t_(t) {
    seq_.u.resize(static_cast<std::size_t>(cfg.Np));
  }

  double operator()(std::span<const double> v) const {
    for (std::size_t i = 0; i < seq_.u.size(); ++i) seq_.u[i] = {v[2 * i], v[2 * i + 1]};
    return evaluate(seq_);
  }

  double evaluate(const ControlSequence& seq) const {
    const auto traj = try_predict(state_, seq, p_, cfg_);
    if (!traj) return std::numeric_limits<double>::infinity();
    const double j = cost(*traj, refs_, boundary_samples(sc_.road, *traj), cfg_) +
                     obstacle_cost(*traj, sc_, t_, cfg_);
    return std::isnan(j) ? std::numeric_limits<double>::infinity() : j;
  }

  const std::vector<Point>& refs() const { return refs_; }

  std::vector<double> lower() const {
    std::vector<double> lo;
    for (int i = 0; i < cfg_.Np; ++i) lo.insert(lo.end(), {-cfg_.delta_max, -cfg_.Tb_max});
    return lo;
  }
  std::vector<double> upper() const {
    std::vector<double> hi;
    for (int i = 0; i < cfg_.Np; ++i) hi.insert(hi.end(), {cfg_.delta_max, cfg_.Td_max});
    return hi;
  }

  static std::vector<double> flatten(const ControlSequence& seq) {
    std::vector<double> v;
    for (const auto& u : seq.u) v.insert(v.end(), {u.delta_f, u.Tr});
    return v;
  }
  static ControlSequence unflatten(std::span<const double> v) {
    ControlSequence seq;
    for (std::size_t i = 0; i + 1 < v.size(); i += 2) seq.u.push_back({v[i], v[i + 1]});
    return seq;
  }

 private:
  VehicleState state_;
  const Scenario& sc_;
  std::vector<Point> refs_;
  VehicleParams p_;
  MpcConfig cfg_;
  double t_;
  mutable ControlSequence seq_;
};

/// The solver's own gradient of the horizon objective at `seq`.
inline std::vector<double> cost_gradient(const HorizonObjective& obj, const ControlSequence& seq,
                                         const MpcConfig& cfg) {
  const std::vector<double> x = HorizonObjective::flatten(seq);
  const std::vector<double> lo = obj.lower(), hi = obj.upper();
  return fd_gradient(obj, x, lo, hi, cfg.solver.fd_step, obj(x));
}

struct StepResult {
  ControlInput u0;
  ControlSequence seq;
  PredictedTrajectory traj;
  double J = 0.0;
  bool converged = false;
  bool fallback = false;  // solver produced no finite cost; seq is the clipped warm start
  int evaluations = 0;
};

inline ControlSequence fit_warm_start(const ControlSequence& warm, const MpcConfig& cfg) {
  ControlSequence seq = warm;
  seq.u.resize(static_cast<std::size_t>(cfg.Np), warm.u.empty() ? ControlInput{} : warm.u.back());
  for (auto& u : seq.u) u = cfg.clip(u);
  return seq;
}

/// One receding-horizon solve at time t. Always returns an in-box sequence.
inline StepResult solve_step(const VehicleState& state, const Scenario& sc, const ReferencePath& path,
                             const VehicleParams& p, const MpcConfig& cfg, const ControlSequence& warm,
                             double t = 0.0) {
  const std::optional<double> ref_speed =
      path.design_speed > 0.0 ? std::optional<double>(path.design_speed) : std::nullopt;
  HorizonObjective obj(state, sc, reference_for_horizon(path, state, cfg.Np, cfg.dt, ref_speed), p, cfg, t);
  const ControlSequence start = fit_warm_start(warm, cfg);
  const std::vector<double> x0 = HorizonObjective::flatten(start);
  const std::vector<double> lo = obj.lower(), hi = obj.upper();

  StepResult out;
  const BoxResult r = minimize_box(obj, lo, hi, x0, cfg.solver);
  out.evaluations = r.evaluations;
  if (std::isfinite(r.f)) {
    out.seq = HorizonObjective::unflatten(r.x);
    out.J = r.f;
    out.converged = r.converged;
  } else {
    out.seq = start;
    out.J = r.f;
    out.fallback = true;
  }
  out.u0 = out.seq.u.front();
  if (auto traj = try_predict(state, out.seq, p, cfg)) out.traj = *traj;
  return out;
}

}  // namespace lcmpc
