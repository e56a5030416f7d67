#pragma once

// Everything except the YAML scenario loader (lcmpc/scenario_io.hpp), which
// needs yaml-cpp.

#include "lcmpc/errors.hpp"
#include "lcmpc/dynamics.hpp"
#include "lcmpc/scenario.hpp"
#include "lcmpc/dubins.hpp"
#include "lcmpc/optimize.hpp"
#include "lcmpc/mpc.hpp"
#include "lcmpc/harness.hpp"
#include "lcmpc/config.hpp"
#include "lcmpc/csv.hpp"
