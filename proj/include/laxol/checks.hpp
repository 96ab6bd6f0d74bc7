#pragma once

/// \file
/// Property suites over grids: minimizer monotonicity, non-intersection of
/// minimizing curves, and the BLN condition along the boundary.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "laxol/boundary.hpp"
#include "laxol/characteristics.hpp"
#include "laxol/functional.hpp"
#include "laxol/solver.hpp"

namespace laxol {

struct SuiteReport {
  std::size_t checked = 0;
  std::size_t failures = 0;
  double worst = 0.0;
  std::vector<std::string> notes;
  bool pass() const { return failures == 0; }

  void fail(const std::string& what) {
    ++failures;
    if (notes.size() < 20) notes.push_back(what);
  }
};

/// Extreme feet in the unified coordinate: y for initial feet, -tau for
/// boundary feet.
struct FootRange {
  double lo = 0.0, hi = 0.0;
  Branch branch = Branch::Initial;
  double tau_lo = kNaN, tau_hi = kNaN;
};

inline FootRange foot_range(const ValueResult& vr) {
  FootRange r;
  r.branch = vr.branch;
  if (vr.B.feasible) {
    r.tau_lo = vr.B.lo;
    r.tau_hi = vr.B.hi;
  }
  switch (vr.branch) {
    case Branch::Initial:
      r.lo = vr.A.lo;
      r.hi = vr.A.hi;
      break;
    case Branch::Boundary:
      r.lo = -vr.B.hi;
      r.hi = -vr.B.lo;
      break;
    case Branch::Tie:
      r.lo = -vr.B.hi;
      r.hi = vr.A.hi;
      break;
  }
  return r;
}

/// For each level t: feet ordered in x, hi(x_i) <= lo(x_{i+1}). For each x:
/// boundary feet increase in t, tau^*(x, t_j) <= tau_*(x, t_{j+1}).
inline SuiteReport monotone_check(const Solver& solver,
                                  const std::vector<double>& xs,
                                  const std::vector<double>& ts) {
  const Problem& p = solver.problem();
  SuiteReport rep;
  std::vector<std::vector<FootRange>> feet(ts.size());
  for (std::size_t j = 0; j < ts.size(); ++j) {
    for (double x : xs) feet[j].push_back(foot_range(solver.functional().value(x, ts[j])));
  }
  auto tol = [&](double x) { return p.tol().arg_tol * (1.0 + std::abs(x)); };
  for (std::size_t j = 0; j < ts.size(); ++j) {
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      const double d = feet[j][i].hi - feet[j][i + 1].lo;
      ++rep.checked;
      rep.worst = std::max(rep.worst, d);
      if (d > tol(xs[i + 1])) {
        std::ostringstream msg;
        msg << "feet out of order at t = " << ts[j] << " between x = "
            << xs[i] << " and " << xs[i + 1] << " by " << d;
        rep.fail(msg.str());
      }
    }
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j + 1 < ts.size(); ++j) {
      const auto& a = feet[j][i];
      const auto& b = feet[j + 1][i];
      if (a.branch == Branch::Initial || b.branch == Branch::Initial) continue;
      const double d = a.tau_hi - b.tau_lo;
      ++rep.checked;
      rep.worst = std::max(rep.worst, d);
      if (d > tol(ts[j + 1])) {
        std::ostringstream msg;
        msg << "boundary feet decrease in t at x = " << xs[i] << " between t = "
            << ts[j] << " and " << ts[j + 1] << " by " << d;
        rep.fail(msg.str());
      }
    }
  }
  return rep;
}

/// Minimizing curves of neighbouring apexes on a level never cross:
/// right(x_i) <= left(x_{i+1}) on the shared theta grid.
inline SuiteReport nip_check(const Solver& solver, const std::vector<double>& xs,
                             const std::vector<double>& ts, int n_theta = 32) {
  const Problem& p = solver.problem();
  SuiteReport rep;
  for (double t : ts) {
    std::vector<CharTriangle> tris;
    for (double x : xs) tris.push_back(build_triangle(solver, x, t, n_theta));
    for (std::size_t i = 0; i + 1 < tris.size(); ++i) {
      const double tol = p.tol().arg_tol * (1.0 + xs[i + 1]);
      for (std::size_t k = 0; k < tris[i].theta.size(); ++k) {
        const double d = tris[i].right[k] - tris[i + 1].left[k];
        ++rep.checked;
        rep.worst = std::max(rep.worst, d);
        if (d > tol) {
          std::ostringstream msg;
          msg << "curves from x = " << xs[i] << " and " << xs[i + 1]
              << " cross at theta = " << tris[i].theta[k] << " (t = " << t
              << ") by " << d;
          rep.fail(msg.str());
          break;
        }
      }
    }
  }
  return rep;
}

/// n sample times for the BLN check: midpoints of a uniform partition of
/// (0, T], moved a quarter spacing later when one lands on a breakpoint of
/// the data, where ub_bar has no single value.
inline std::vector<double> bln_times(const Problem& p, double T, int n) {
  std::vector<double> ts;
  const double dt = T / n;
  for (int k = 0; k < n; ++k) {
    double t = (k + 0.5) * dt;
    for (double b : p.time_breaks()) {
      if (std::abs(t - b) <= 1e-6 * dt) t += 0.25 * dt;
    }
    ts.push_back(t);
  }
  return ts;
}

/// BLN verdicts for the Richardson boundary trace at the given times.
inline std::vector<BlnVerdict> bln_suite(const Solver& solver,
                                         const std::vector<double>& ts) {
  std::vector<BlnVerdict> out;
  for (double t : ts) {
    out.push_back(bln_check(solver.boundary_trace(t), t, solver.problem()));
  }
  return out;
}

}  // namespace laxol
