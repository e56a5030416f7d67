#pragma once

/**
 * @file optimize.hpp
 * @brief Deterministic derivative-free box-constrained minimizer.
 *
 * Two phases, both working in coordinates scaled to [-1, 1] per variable:
 *
 *  1. projected gradient descent with finite-difference gradients and an
 *     Armijo backtracking line search along the projection arc;
 *  2. a coordinate pattern search that polishes the result, halving its step
 *     until it falls below `pattern_tol`.
 *
 * Every trial point is projected onto the box, so returned points are always
 * feasible. The best point seen is returned, so f(x*) <= f(x0).
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace lcmpc {

struct BoxOptions {
  double grad_tol = 1e-10;    // stop phase 1 when the scaled projected step is below this
  double f_tol = 1e-14;       // ... or the relative decrease is below this
  int max_iter = 200;         // phase 1 iteration cap
  double fd_step = 1e-6;      // finite-difference step, relative to the half-width
  double pattern_step = 0.05; // initial pattern-search step (scaled units)
  double pattern_tol = 1e-9;  // final pattern-search step (scaled units)
  int max_pattern_sweeps = 2000;
};

struct BoxResult {
  std::vector<double> x;
  double f = std::numeric_limits<double>::infinity();
  int iterations = 0;   // phase 1 iterations
  int evaluations = 0;  // objective evaluations
  bool converged = false;
};

/// Finite-difference gradient of f at x. Central differences with step
/// rel_step * half-width; one-sided at a bound so no evaluation leaves the box.
template <class F>
std::vector<double> fd_gradient(F&& f, std::span<const double> x, std::span<const double> lower,
                                std::span<const double> upper, double rel_step, double fx,
                                int* evaluations = nullptr) {
  const std::size_t n = x.size();
  std::vector<double> g(n, 0.0);
  std::vector<double> probe(x.begin(), x.end());
  for (std::size_t i = 0; i < n; ++i) {
    const double half = 0.5 * (upper[i] - lower[i]);
    const double h = rel_step * (half > 0.0 ? half : 1.0);
    const bool up_ok = x[i] + h <= upper[i];
    const bool down_ok = x[i] - h >= lower[i];
    if (!up_ok && !down_ok) continue;
    double fp = fx, fm = fx, span = 0.0;
    if (up_ok) {
      probe[i] = x[i] + h;
      fp = f(std::span<const double>(probe));
      span += h;
    }
    if (down_ok) {
      probe[i] = x[i] - h;
      fm = f(std::span<const double>(probe));
      span += h;
    }
    probe[i] = x[i];
    if (evaluations) *evaluations += int(up_ok) + int(down_ok);
    g[i] = (fp - fm) / span;
  }
  return g;
}

template <class F>
BoxResult minimize_box(F&& f, std::span<const double> lower, std::span<const double> upper,
                       std::span<const double> x0, const BoxOptions& opt = {}) {
  const std::size_t n = x0.size();
  if (lower.size() != n || upper.size() != n)
    throw std::invalid_argument("minimize_box: bound dimensions differ from x0");
  for (std::size_t i = 0; i < n; ++i)
    if (!(lower[i] <= x0[i] && x0[i] <= upper[i]))
      throw std::invalid_argument("minimize_box: x0 outside the box");

  std::vector<double> mid(n), half(n);
  for (std::size_t i = 0; i < n; ++i) {
    mid[i] = 0.5 * (lower[i] + upper[i]);
    half[i] = 0.5 * (upper[i] - lower[i]);
  }
  std::vector<double> z0(n);
  for (std::size_t i = 0; i < n; ++i) z0[i] = half[i] > 0.0 ? (x0[i] - mid[i]) / half[i] : 0.0;
  // Untouched coordinates map back to x0 bit-for-bit.
  std::vector<double> x(n);
  auto to_x = [&](std::span<const double> z) {
    for (std::size_t i = 0; i < n; ++i)
      x[i] = z[i] == z0[i] ? x0[i] : std::clamp(mid[i] + half[i] * z[i], lower[i], upper[i]);
    return std::span<const double>(x);
  };
  BoxResult res;
  auto fz = [&](std::span<const double> z) {
    ++res.evaluations;
    return f(to_x(z));
  };

  std::vector<double> z = z0, zl(n, -1.0), zu(n, 1.0);
  double fcur = fz(z);

  // Phase 1: projected gradient.
  double alpha = 1.0;
  std::vector<double> trial(n);
  if (std::isfinite(fcur)) {
    for (res.iterations = 0; res.iterations < opt.max_iter; ++res.iterations) {
      const std::vector<double> g = fd_gradient(fz, z, zl, zu, opt.fd_step, fcur);
      if (!std::all_of(g.begin(), g.end(), [](double v) { return std::isfinite(v); })) break;
      double pg = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        pg = std::max(pg, std::abs(std::clamp(z[i] - g[i], -1.0, 1.0) - z[i]));
      if (pg < opt.grad_tol) break;
      bool accepted = false;
      double fnew = fcur;
      for (int bt = 0; bt < 60; ++bt) {
        double decrease = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          trial[i] = std::clamp(z[i] - alpha * g[i], -1.0, 1.0);
          decrease += g[i] * (z[i] - trial[i]);
        }
        fnew = fz(trial);
        if (std::isfinite(fnew) && fnew <= fcur - 1e-4 * decrease) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) break;
      const double rel = (fcur - fnew) / std::max(std::abs(fcur), 1e-300);
      z = trial;
      fcur = fnew;
      alpha = std::min(alpha * 4.0, 1e6);
      if (rel < opt.f_tol) break;
    }
  }

  // Phase 2: coordinate pattern search, symmetric in +/- directions.
  double step = opt.pattern_step;
  int sweeps = 0;
  for (; step >= opt.pattern_tol && sweeps < opt.max_pattern_sweeps; ++sweeps) {
    bool improved = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (half[i] == 0.0) continue;
      double best = fcur;
      double best_zi = z[i];
      const double zi = z[i];
      for (double dir : {1.0, -1.0}) {
        const double cand = std::clamp(zi + dir * step, -1.0, 1.0);
        if (cand == zi) continue;
        z[i] = cand;
        const double fc = fz(z);
        if (fc < best) {
          best = fc;
          best_zi = cand;
        }
      }
      z[i] = best_zi;
      if (best < fcur) {
        fcur = best;
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  res.converged = res.iterations < opt.max_iter && sweeps < opt.max_pattern_sweeps &&
                  std::isfinite(fcur);

  to_x(z);
  res.x = x;
  res.f = fcur;
  return res;
}

}  // namespace lcmpc
