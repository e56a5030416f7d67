#pragma once

#include <stdexcept>
#include <string>

namespace lcmpc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Longitudinal speed too low for the small-angle slip model.
class SingularSlipError : public Error {
 public:
  using Error::Error;
};

/// Plant integration left the valid region (vx below floor or non-finite state).
class PlantFailure : public Error {
 public:
  using Error::Error;
};

/// Obstacles leave no room for the minimum-radius lane-change arcs.
class InfeasibleGeometry : public Error {
 public:
  using Error::Error;
};

/// Invalid parameter set, scenario, or configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace lcmpc
