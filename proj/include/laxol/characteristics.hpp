#pragma once

/// \file
/// Generalized characteristics, characteristic triangles and the Lax
/// entropy inequality at detected jumps.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "laxol/functional.hpp"
#include "laxol/numerics.hpp"
#include "laxol/problem.hpp"
#include "laxol/solver.hpp"

namespace laxol {

/// One-sided states at (x, t) read off the extreme minimizers, and the
/// speed of the generalized characteristic through the point.
struct CharSpeed {
  double speed = 0.0;
  double u_left = 0.0, u_right = 0.0;
  Branch branch = Branch::Initial;
  /// Extreme minimizers differ: the speed is a Rankine-Hugoniot ratio.
  bool shock = false;
  /// Distinct feet but nearly equal states; f' of the mean is used.
  bool flagged = false;
};

/// States ordered by foot: initial feet at y, boundary feet at -tau. The
/// smallest foot carries the left state.
inline CharSpeed char_speed(const Solver& solver, double x, double t) {
  const Problem& p = solver.problem();
  const auto vr = solver.functional().value(x, t);
  const double eb = p.source().exp_beta(t);
  const double band = p.tol().arg_tol * (1.0 + std::abs(x));
  CharSpeed out;
  out.branch = vr.branch;
  switch (vr.branch) {
    case Branch::Initial:
      out.u_left = eb * vr.A.h_lo;
      out.u_right = eb * vr.A.h_hi;
      out.shock = vr.A.hi - vr.A.lo > band;
      break;
    case Branch::Boundary:
      out.u_left = eb * vr.B.h_hi;
      out.u_right = eb * vr.B.h_lo;
      out.shock = vr.B.hi - vr.B.lo > band;
      break;
    case Branch::Tie:
      out.u_left = eb * vr.B.h_hi;
      out.u_right = eb * vr.A.h_hi;
      out.shock = vr.A.hi > band || vr.B.hi > band;
      break;
  }
  const auto& f = p.flux();
  const double du = out.u_left - out.u_right;
  if (out.shock && std::abs(du) > band * (1.0 + std::abs(out.u_left))) {
    out.speed = (f.f(out.u_left) - f.f(out.u_right)) / du;
  } else {
    out.flagged = out.shock;
    out.speed = f.fprime(0.5 * (out.u_left + out.u_right));
  }
  return out;
}

struct CharacteristicCurve {
  std::vector<double> t, x, speed;
  std::vector<bool> shock;
  /// The curve reached x = 0 and was held there.
  bool clipped = false;
  /// Times at which the tracer moved back onto a jump it had lost.
  std::vector<double> relocations;
  bool ok = true;
  std::string error;
};

/// Explicit Euler on the generalized characteristic speed from (x0, t0).
/// Once the curve rides a jump, losing it at the next node triggers a
/// local jump search and the node moves to the refined jump position.
inline CharacteristicCurve trace(const Solver& solver, double x0, double t0,
                                 double t1, double dt) {
  if (!(t0 > 0.0 && t0 < t1 && dt > 0.0)) {
    throw ConfigError("trace: need 0 < t0 < t1 and dt > 0");
  }
  const Problem& p = solver.problem();
  CharacteristicCurve c;
  const int steps = static_cast<int>(std::ceil((t1 - t0) / dt - 1e-9));
  const double h = (t1 - t0) / steps;
  double x = x0;
  bool locked = false;
  double jump_size = 0.0;
  for (int k = 0; k <= steps; ++k) {
    const double t = k == steps ? t1 : t0 + k * h;
    CharSpeed cs;
    try {
      cs = char_speed(solver, x, t);
      if (locked && !cs.shock) {
        const double vmax = p.speed_bound(
            std::max(std::abs(cs.u_left), std::abs(cs.u_right)) + jump_size);
        const double d = 2.0 * h * vmax + 1e-9;
        const auto l = solver.try_point(std::max(0.0, x - d), t);
        const auto r = solver.try_point(x + d, t);
        if (l.ok && r.ok && std::abs(l.u - r.u) > 0.5 * jump_size) {
          x = solver.refine_jump(l, r).x;
          c.relocations.push_back(t);
          cs = char_speed(solver, x, t);
        }
      }
    } catch (const std::exception& e) {
      c.ok = false;
      c.error = e.what();
      return c;
    }
    c.t.push_back(t);
    c.x.push_back(x);
    c.speed.push_back(cs.speed);
    c.shock.push_back(cs.shock);
    locked = cs.shock;
    if (cs.shock) jump_size = std::abs(cs.u_left - cs.u_right);
    if (k == steps) break;
    x += h * cs.speed;
    if (x < 0.0) {
      x = 0.0;
      c.clipped = true;
    }
  }
  return c;
}

enum class TriangleCase { Initial, Boundary, Mixed };

inline const char* triangle_case_name(TriangleCase c) {
  switch (c) {
    case TriangleCase::Initial: return "initial";
    case TriangleCase::Boundary: return "boundary";
    case TriangleCase::Mixed: return "mixed";
  }
  return "?";
}

/// Region between the extreme minimizing h-curves from the apex, sampled
/// on a common theta grid. A boundary curve sits at x = 0 below its foot.
struct CharTriangle {
  double x = 0.0, t = 0.0;
  TriangleCase kind = TriangleCase::Initial;
  std::vector<double> theta;
  std::vector<double> left, right;
  /// Base on the x-axis [y_lo, y_hi] or t-axis [tau_lo, tau_hi].
  double base_lo = 0.0, base_hi = 0.0;
};

namespace detail {

inline std::vector<double> foot_curve(const Problem& p, bool boundary,
                                      double foot, double h,
                                      const std::vector<double>& theta) {
  const auto& hc = p.curves();
  std::vector<double> out(theta.size(), 0.0);
  const double start = boundary ? foot : 0.0;
  long double x = boundary ? 0.0L : static_cast<long double>(foot);
  double prev = start;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (theta[i] <= start) {
      out[i] = static_cast<double>(x);
      continue;
    }
    x += hc.displacement(h, prev, theta[i]);
    prev = theta[i];
    out[i] = static_cast<double>(x);
  }
  return out;
}

}  // namespace detail

inline CharTriangle build_triangle(const Solver& solver, double x, double t,
                                   int n_theta = 64) {
  const Problem& p = solver.problem();
  const auto vr = solver.functional().value(x, t);
  CharTriangle tri;
  tri.x = x;
  tri.t = t;
  tri.theta = linspace(0.0, t, static_cast<std::size_t>(n_theta) + 1);
  auto curve = [&](bool boundary, double foot, double h) {
    return detail::foot_curve(p, boundary, foot, h, tri.theta);
  };
  switch (vr.branch) {
    case Branch::Initial:
      tri.kind = TriangleCase::Initial;
      tri.left = curve(false, vr.A.lo, vr.A.h_lo);
      tri.right = curve(false, vr.A.hi, vr.A.h_hi);
      tri.base_lo = vr.A.lo;
      tri.base_hi = vr.A.hi;
      break;
    case Branch::Boundary:
      tri.kind = TriangleCase::Boundary;
      tri.left = curve(true, vr.B.hi, vr.B.h_hi);
      tri.right = curve(true, vr.B.lo, vr.B.h_lo);
      tri.base_lo = vr.B.lo;
      tri.base_hi = vr.B.hi;
      break;
    case Branch::Tie:
      tri.kind = TriangleCase::Mixed;
      tri.left = curve(true, vr.B.hi, vr.B.h_hi);
      tri.right = curve(false, vr.A.hi, vr.A.h_hi);
      tri.base_lo = vr.B.hi;
      tri.base_hi = vr.A.hi;
      break;
  }
  // The apex is exact; the sampled curves end there up to quadrature error.
  tri.left.back() = tri.right.back() = x;
  return tri;
}

struct TriangleReport {
  bool disjoint = true;
  bool covering = true;
  bool pass() const { return disjoint && covering; }
  double tolerance = 0.0;
  /// Largest overlap R_i - L_{i+1} seen, and largest uncovered gap.
  double worst_overlap = 0.0;
  double worst_gap = 0.0;
  std::size_t triangles = 0;
  std::vector<std::string> notes;
};

/// Checks interior disjointness of consecutive same-level triangles and that
/// every sampled point of the strip under the last triangle lies in one.
inline TriangleReport check_triangles(const std::vector<CharTriangle>& tris,
                                      double tol, int xi_per_cell = 4) {
  TriangleReport rep;
  rep.tolerance = tol;
  rep.triangles = tris.size();
  if (tris.empty()) {
    rep.covering = false;
    rep.notes.push_back("no triangles");
    return rep;
  }
  std::vector<const CharTriangle*> order;
  for (const auto& tr : tris) order.push_back(&tr);
  std::sort(order.begin(), order.end(),
            [](const CharTriangle* a, const CharTriangle* b) { return a->x < b->x; });
  const auto& theta = order.front()->theta;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    for (std::size_t k = 0; k < theta.size(); ++k) {
      const double over = order[i]->right[k] - order[i + 1]->left[k];
      rep.worst_overlap = std::max(rep.worst_overlap, over);
      if (over > tol && rep.disjoint) {
        rep.disjoint = false;
        rep.notes.push_back("overlap between apexes x = " +
                            std::to_string(order[i]->x) + " and " +
                            std::to_string(order[i + 1]->x) + " at theta = " +
                            std::to_string(theta[k]));
      }
    }
  }
  for (std::size_t k = 0; k < theta.size(); ++k) {
    // Union of [L_i, R_i] at this level, as sorted intervals.
    std::vector<std::pair<double, double>> iv;
    for (const auto* tr : order) iv.emplace_back(tr->left[k], tr->right[k]);
    std::sort(iv.begin(), iv.end());
    const double hi = order.back()->right[k];
    const int n = std::max(1, static_cast<int>(order.size()) * xi_per_cell);
    std::size_t j = 0;
    double reach = -kInf;
    for (int s = 0; s <= n; ++s) {
      const double xi = hi * s / n;
      while (j < iv.size() && iv[j].first - tol <= xi) {
        reach = std::max(reach, iv[j].second);
        ++j;
      }
      const double gap = xi - (reach + tol);
      if (gap > 0.0) {
        rep.worst_gap = std::max(rep.worst_gap, gap);
        if (rep.covering) {
          rep.covering = false;
          rep.notes.push_back("uncovered point xi = " + std::to_string(xi) +
                              " at theta = " + std::to_string(theta[k]));
        }
      }
    }
  }
  return rep;
}

/// Triangles at the apexes xs (plus the refined jump positions on the level)
/// checked with tolerance 2 * max spacing of xs.
inline TriangleReport check_triangle_cover(const Solver& solver, double t0,
                                           const std::vector<double>& xs,
                                           int n_theta = 64) {
  SolutionField row = solver.solve_grid(xs, {t0});
  // A jump apex replaces grid apexes that resolve to the same triangle.
  const double band = solver.problem().tol().arg_tol;
  std::vector<double> apex;
  for (double x : xs) {
    bool near = false;
    for (const auto& j : row.jumps[0]) {
      if (std::abs(j.x - x) <= band * (1.0 + x)) near = true;
    }
    if (!near) apex.push_back(x);
  }
  for (const auto& j : row.jumps[0]) apex.push_back(j.x);
  std::sort(apex.begin(), apex.end());
  double spacing = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    spacing = std::max(spacing, xs[i + 1] - xs[i]);
  }
  std::vector<CharTriangle> tris;
  for (double x : apex) tris.push_back(build_triangle(solver, x, t0, n_theta));
  auto rep = check_triangles(tris, 2.0 * spacing);
  rep.notes.push_back(std::to_string(row.jumps[0].size()) +
                      " jump apexes added");
  return rep;
}

struct EntropyViolation {
  Jump jump;
  double speed = 0.0;
  double margin = 0.0;
};

struct EntropyReport {
  std::size_t checked = 0;
  double min_margin = kInf;
  std::vector<EntropyViolation> violations;
  bool pass() const { return violations.empty(); }
};

/// Lax inequality f'(u_l) > s > f'(u_r) at every jump, with
/// margin = min(f'(u_l) - s, s - f'(u_r)) required >= -entropy_tol.
inline EntropyReport entropy_check(const std::vector<Jump>& jumps,
                                   const Problem& p) {
  EntropyReport rep;
  const auto& f = p.flux();
  for (const auto& j : jumps) {
    const double du = j.u_left - j.u_right;
    if (du == 0.0) continue;
    const double s = (f.f(j.u_left) - f.f(j.u_right)) / du;
    const double margin =
        std::min(f.fprime(j.u_left) - s, s - f.fprime(j.u_right));
    ++rep.checked;
    rep.min_margin = std::min(rep.min_margin, margin);
    if (margin < -p.tol().entropy_tol) rep.violations.push_back({j, s, margin});
  }
  return rep;
}

inline EntropyReport entropy_check(const SolutionField& field,
                                   const Problem& p) {
  std::vector<Jump> all;
  for (const auto& row : field.jumps) all.insert(all.end(), row.begin(), row.end());
  return entropy_check(all, p);
}

}  // namespace laxol
