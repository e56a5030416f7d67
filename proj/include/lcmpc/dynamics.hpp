#pragma once

/**
 * @file dynamics.hpp
 * @brief Planar 2-DOF nonlinear bicycle model with linear lateral tyres.
 *
 * State equations (body velocities vx, vy, yaw rate r, global pose X, Y, psi):
 *
 *   dvx/dt = r*vy - (2/m) * (Fcf*sin(delta_f) - Tr/Rw)
 *   dvy/dt = -r*vx + (2/m) * (Fcf*cos(delta_f) + Fcr)
 *   dr/dt  = (2/Iz) * (lf*Fcf - lr*Fcr)
 *   dX/dt  = vx*cos(psi) - vy*sin(psi)
 *   dY/dt  = vx*sin(psi) + vy*cos(psi)
 *   dpsi/dt = r
 *
 * with Fci = -C_alpha_i * alpha_i and small-angle slip angles
 *
 *   alpha_f = (vy + lf*r)/vx - delta_f,   alpha_r = (vy - lr*r)/vx.
 *
 * The sign of the torque term is kept exactly as written above: the double
 * negative makes positive Tr (driving) accelerate the vehicle and negative Tr
 * (braking) decelerate it. There is no Fcr contribution to dvx/dt.
 */

#include <cmath>
#include <string>

#include "lcmpc/errors.hpp"

namespace lcmpc {

/// Below this longitudinal speed the slip-angle model is rejected outright.
inline constexpr double kMinLongitudinalSpeed = 0.1;

struct VehicleParams {
  double m = 2000.0;    // mass [kg]
  double Iz = 1300.0;   // yaw inertia [kg m^2]
  double lf = 1.2;      // CM to front axle [m]
  double lr = 1.05;     // CM to rear axle [m]
  double Caf = 12000.0; // front cornering stiffness [N/rad]
  double Car = 12000.0; // rear cornering stiffness [N/rad]
  double Rw = 0.3;      // rear wheel effective radius [m]
  double mu = 0.5;      // road friction coefficient [-]
  double g = 9.81;      // gravitational acceleration [m/s^2]

  double wheelbase() const { return lf + lr; }

  /// Throws ConfigError naming the first offending field.
  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw ConfigError(std::string("vehicle parameter '") + name + "' must be finite and > 0");
    };
    positive(m, "m");
    positive(Iz, "Iz");
    positive(lf, "lf");
    positive(lr, "lr");
    positive(Caf, "Caf");
    positive(Car, "Car");
    positive(Rw, "Rw");
    positive(mu, "mu");
    positive(g, "g");
    if (mu > 1.5) throw ConfigError("vehicle parameter 'mu' must be <= 1.5");
  }
};

struct VehicleState {
  double vx = 0.0;   // longitudinal body velocity [m/s]
  double vy = 0.0;   // lateral body velocity [m/s]
  double r = 0.0;    // yaw rate [rad/s]
  double X = 0.0;    // global longitudinal position [m]
  double Y = 0.0;    // global lateral position [m]
  double psi = 0.0;  // heading [rad]

  bool finite() const {
    return std::isfinite(vx) && std::isfinite(vy) && std::isfinite(r) && std::isfinite(X) &&
           std::isfinite(Y) && std::isfinite(psi);
  }

  friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

/// Time derivative of a VehicleState, field for field.
struct StateRate {
  double vx = 0.0;
  double vy = 0.0;
  double r = 0.0;
  double X = 0.0;
  double Y = 0.0;
  double psi = 0.0;
};

struct ControlInput {
  double delta_f = 0.0;  // front wheel steering angle [rad]
  double Tr = 0.0;       // rear wheel torque [N m], > 0 driving, < 0 braking

  friend bool operator==(const ControlInput&, const ControlInput&) = default;
};

struct SlipAngles {
  double front = 0.0;
  double rear = 0.0;
};

struct TireForces {
  double front = 0.0;  // Fcf [N]
  double rear = 0.0;   // Fcr [N]
};

inline SlipAngles slip_angles(const VehicleState& s, double delta_f, const VehicleParams& p) {
  if (!(s.vx >= kMinLongitudinalSpeed))
    throw SingularSlipError("slip angle undefined: vx = " + std::to_string(s.vx) +
                            " is below the 0.1 m/s floor");
  return {(s.vy + p.lf * s.r) / s.vx - delta_f, (s.vy - p.lr * s.r) / s.vx};
}

inline TireForces lateral_tire_forces(const SlipAngles& alpha, const VehicleParams& p) {
  return {-p.Caf * alpha.front, -p.Car * alpha.rear};
}

inline StateRate state_derivative(const VehicleState& s, const ControlInput& u,
                                  const VehicleParams& p) {
  const TireForces f = lateral_tire_forces(slip_angles(s, u.delta_f, p), p);
  const double c = std::cos(s.psi);
  const double sn = std::sin(s.psi);
  StateRate d;
  d.vx = s.r * s.vy - (2.0 / p.m) * (f.front * std::sin(u.delta_f) - u.Tr / p.Rw);
  d.vy = -s.r * s.vx + (2.0 / p.m) * (f.front * std::cos(u.delta_f) + f.rear);
  d.r = (2.0 / p.Iz) * (p.lf * f.front - p.lr * f.rear);
  d.X = s.vx * c - s.vy * sn;
  d.Y = s.vx * sn + s.vy * c;
  d.psi = s.r;
  return d;
}

namespace detail {
inline VehicleState advance(const VehicleState& s, const StateRate& d, double h) {
  return {s.vx + h * d.vx, s.vy + h * d.vy, s.r + h * d.r,
          s.X + h * d.X,   s.Y + h * d.Y,   s.psi + h * d.psi};
}
}  // namespace detail

/// Classical 4-stage Runge-Kutta step with the control held constant over dt.
inline VehicleState step(const VehicleState& s, const ControlInput& u, const VehicleParams& p,
                         double dt) {
  if (!(dt >= 0.0)) throw ConfigError("integration step dt must be >= 0");
  if (dt == 0.0) return s;
  try {
    const StateRate k1 = state_derivative(s, u, p);
    const StateRate k2 = state_derivative(detail::advance(s, k1, 0.5 * dt), u, p);
    const StateRate k3 = state_derivative(detail::advance(s, k2, 0.5 * dt), u, p);
    const StateRate k4 = state_derivative(detail::advance(s, k3, dt), u, p);
    const double w = dt / 6.0;
    VehicleState out{
        s.vx + w * (k1.vx + 2.0 * k2.vx + 2.0 * k3.vx + k4.vx),
        s.vy + w * (k1.vy + 2.0 * k2.vy + 2.0 * k3.vy + k4.vy),
        s.r + w * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r),
        s.X + w * (k1.X + 2.0 * k2.X + 2.0 * k3.X + k4.X),
        s.Y + w * (k1.Y + 2.0 * k2.Y + 2.0 * k3.Y + k4.Y),
        s.psi + w * (k1.psi + 2.0 * k2.psi + 2.0 * k3.psi + k4.psi),
    };
    if (!out.finite()) throw PlantFailure("plant integration produced a non-finite state");
    if (out.vx < kMinLongitudinalSpeed)
      throw PlantFailure("plant integration drove vx below the 0.1 m/s floor");
    return out;
  } catch (const SingularSlipError& e) {
    throw PlantFailure(std::string("plant integration failed: ") + e.what());
  }
}

/// Reflection about the X axis: negates vy, r, Y, psi (and delta_f for controls).
inline VehicleState mirrored(const VehicleState& s) {
  return {s.vx, -s.vy, -s.r, s.X, -s.Y, -s.psi};
}

inline ControlInput mirrored(const ControlInput& u) { return {-u.delta_f, u.Tr}; }

}  // namespace lcmpc
