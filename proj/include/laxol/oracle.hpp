#pragma once

/// \file
/// First-order Godunov finite-volume reference solver with an exact
/// integrating factor for the linear source.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "laxol/flux.hpp"
#include "laxol/numerics.hpp"
#include "laxol/problem.hpp"

namespace laxol {

/// Godunov flux for convex f: min of f on [a, b] when a <= b, else max of
/// f(a), f(b).
inline double godunov_flux(double a, double b, const FluxModel& f) {
  if (a <= b) return f.f(std::clamp(f.lambda_f(), a, b));
  return std::max(f.f(a), f.f(b));
}

struct FVConfig {
  int cells = 800;
  double cfl = 0.45;
  /// Domain right end; 0 takes the problem's x_max.
  double x_max = 0.0;
  std::vector<double> output_times{1.0};
};

struct OracleField {
  double dx = 0.0;
  /// Cell centers.
  std::vector<double> xs;
  std::vector<double> ts;
  /// u[j][i]: average of cell i at ts[j].
  std::vector<std::vector<double>> u;
  long steps = 0;
  /// Steps shrunk because the ghost value changed within the step.
  long cfl_reductions = 0;
};

inline OracleField run_oracle(const Problem& p, const FVConfig& cfg) {
  if (cfg.cells < 2 || !(cfg.cfl > 0.0 && cfg.cfl <= 1.0)) {
    throw ConfigError("oracle: need cells >= 2 and 0 < cfl <= 1");
  }
  auto times = cfg.output_times;
  std::sort(times.begin(), times.end());
  if (times.empty() || times.front() < 0.0 ||
      times.back() > p.t_max() * (1.0 + 1e-12)) {
    throw ConfigError("oracle: output times must lie in [0, t_max]");
  }
  const auto& f = p.flux();
  const double L = cfg.x_max > 0.0 ? cfg.x_max : p.x_max();
  const int n = cfg.cells;
  OracleField out;
  out.dx = L / n;
  out.ts = times;
  out.xs.resize(static_cast<std::size_t>(n));
  std::vector<double> u(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double a = i * out.dx, b = (i + 1) * out.dx;
    out.xs[static_cast<std::size_t>(i)] = 0.5 * (a + b);
    u[static_cast<std::size_t>(i)] = (p.U0(b) - p.U0(a)) / out.dx;
  }
  std::vector<double> flux(static_cast<std::size_t>(n) + 1);
  double t = 0.0;
  std::size_t next = 0;
  auto max_speed = [&](double ghost) {
    double s = std::abs(f.fprime(ghost));
    for (double v : u) s = std::max(s, std::abs(f.fprime(v)));
    return s;
  };
  while (next < times.size()) {
    if (times[next] - t <= 1e-14 * (1.0 + t)) {
      out.u.push_back(u);
      ++next;
      continue;
    }
    const double s = max_speed(p.ub_bar(t));
    double dt = s > 0.0 ? cfg.cfl * out.dx / s : times[next] - t;
    dt = std::min(dt, times[next] - t);
    double ghost_mid = p.ub_bar(t + 0.5 * dt);
    const double sg = std::abs(f.fprime(ghost_mid));
    if (sg > s) {
      // The boundary datum jumps inside the step; shrink to its speed.
      dt = std::min(dt, cfg.cfl * out.dx / sg);
      ghost_mid = p.ub_bar(t + 0.5 * dt);
      ++out.cfl_reductions;
    }
    flux[0] = godunov_flux(ghost_mid, u[0], f);
    for (int i = 1; i < n; ++i) {
      flux[static_cast<std::size_t>(i)] =
          godunov_flux(u[static_cast<std::size_t>(i - 1)],
                       u[static_cast<std::size_t>(i)], f);
    }
    flux[static_cast<std::size_t>(n)] = f.f(u.back());
    const double factor =
        std::exp(p.source().beta(t + dt) - p.source().beta(t));
    const double r = dt / out.dx;
    for (int i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      u[k] = factor * (u[k] - r * (flux[k + 1] - flux[k]));
    }
    t += dt;
    ++out.steps;
    if (!std::isfinite(u.front()) || !std::isfinite(u.back())) {
      std::ostringstream msg;
      msg << "oracle: non-finite state at t = " << t;
      throw NumericalError(msg.str());
    }
  }
  return out;
}

/// Cell-weighted L1 distance sum |a_i - b_i| dx over cells with centers in
/// [lo, hi].
inline double l1_distance(const std::vector<double>& xs,
                          const std::vector<double>& a,
                          const std::vector<double>& b, double dx,
                          double lo = -kInf, double hi = kInf) {
  if (a.size() != xs.size() || b.size() != xs.size()) {
    throw ConfigError("l1_distance: fields sampled on different grids");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] < lo || xs[i] > hi) continue;
    s += std::abs(a[i] - b[i]) * dx;
  }
  return s;
}

}  // namespace laxol
