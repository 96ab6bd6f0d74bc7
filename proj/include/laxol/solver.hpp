#pragma once

/// \file
/// u(x, t) from the variational formula, gridded fields with jump
/// detection, boundary traces and the weak-form residual.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "laxol/boundary_table.hpp"
#include "laxol/functional.hpp"
#include "laxol/numerics.hpp"
#include "laxol/problem.hpp"

namespace laxol {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct SolutionSample {
  double x = 0.0, t = 0.0;
  double u = kNaN;
  double W = kNaN;
  Branch branch = Branch::Initial;
  double y_lo = kNaN, y_hi = kNaN;
  double tau_lo = kNaN, tau_hi = kNaN;
  /// The h argument before the e^{beta(t)} factor.
  double h_value = kNaN;
  /// One-sided values from each family; both set only at ties.
  double u_initial = kNaN, u_boundary = kNaN;
  bool ok = true;
  std::string error;
};

struct Jump {
  double t = 0.0;
  double x = 0.0;
  double u_left = 0.0, u_right = 0.0;
};

struct SolutionField {
  std::vector<double> xs, ts;
  /// samples[j][i] is the sample at (xs[i], ts[j]).
  std::vector<std::vector<SolutionSample>> samples;
  std::vector<std::vector<Jump>> jumps;
  /// Discontinuities that collapse onto x = 0 under refinement. These are
  /// boundary layers, judged by the BLN condition rather than by entropy.
  std::vector<std::vector<Jump>> boundary_layers;
  std::size_t failures = 0;

  double u(std::size_t i, std::size_t j) const { return samples[j][i].u; }
};

struct SolverOptions {
  /// Scan cells for the per-point minimizations; 0 uses the problem value.
  int scan_cells = 256;
  /// Absolute floor for the jump threshold, scaled by (1 + max|u|).
  double jump_floor = 1e-3;
  int refine_iterations = 40;
};

class Solver {
 public:
  Solver(const Problem& p, const BoundaryTable* table, SolverOptions opts = {})
      : p_(p), table_(table), opts_(opts), fn_(p, table, {.scan_cells = opts.scan_cells}) {}

  const Functional& functional() const { return fn_; }
  const Problem& problem() const { return p_; }

  SolutionSample solve_point(double x, double t) const {
    SolutionSample s;
    s.x = x;
    s.t = t;
    if (t == 0.0 && x >= 0.0) {
      s.u = p_.u0_at(x);
      s.W = p_.U0(x);
      s.y_lo = s.y_hi = x;
      s.h_value = s.u;
      return s;
    }
    const auto vr = fn_.value(x, t);
    s.W = vr.W;
    s.branch = vr.branch;
    const double eb = p_.source().exp_beta(t);
    if (vr.A.feasible) {
      s.y_lo = vr.A.lo;
      s.y_hi = vr.A.hi;
    }
    if (vr.B.feasible) {
      s.tau_lo = vr.B.lo;
      s.tau_hi = vr.B.hi;
    }
    switch (vr.branch) {
      case Branch::Initial:
        s.h_value = vr.A.h_hi;
        break;
      case Branch::Boundary:
        s.h_value = vr.B.h_hi;
        break;
      case Branch::Tie:
        s.u_initial = eb * vr.A.h_hi;
        s.u_boundary = eb * vr.B.h_hi;
        s.h_value = vr.B.h_hi;
        break;
    }
    s.u = eb * s.h_value;
    return s;
  }

  /// Like solve_point, but failures are recorded on the sample.
  SolutionSample try_point(double x, double t) const {
    try {
      return solve_point(x, t);
    } catch (const std::exception& e) {
      SolutionSample s;
      s.x = x;
      s.t = t;
      s.ok = false;
      s.error = e.what();
      return s;
    }
  }

  double u_at(double x, double t) const { return solve_point(x, t).u; }

  /// u from the single lowest-valued candidate of both branches, ignoring
  /// the tie band. Bisection on it converges to the crossing of the two
  /// basin values rather than to the edge of the band. Candidates of one
  /// branch are ranked by their excess, which survives a large W.
  double u_best(double x, double t) const {
    if (t == 0.0) return p_.u0_at(x);
    const auto vr = fn_.value(x, t);
    auto lowest = [](const MinimizationResult& r) -> const Candidate* {
      const Candidate* best = nullptr;
      for (const auto& c : r.candidates) {
        if (!best || c.excess < best->excess) best = &c;
      }
      return best;
    };
    const Candidate* a = lowest(vr.A);
    const Candidate* b = lowest(vr.B);
    const Candidate* best = a;
    if (!a) {
      best = b;
    } else if (b && a->value - (b->value - b->excess) > b->excess) {
      best = b;
    }
    return p_.source().exp_beta(t) * best->h;
  }

  /// u(0+, t) by Richardson extrapolation in s = sqrt(x) from x = h, 4h,
  /// 16h, which removes both the s and the s^2 = x terms; profiles next to a
  /// sonic boundary grow like sqrt(x). Without an explicit h the stencil
  /// starts inside the region reached by speeds up to the data bound and
  /// shrinks by 16 for as long as it pays:
  ///  - the admissibility band eps_adm perturbs u(h) - u(0+) by about
  ///    eps_adm / (2h) of itself, which must stay below tol_bln / 2;
  ///  - t - tau must stay well above the resolution of t;
  ///  - a new point much farther from the estimate than the last one means
  ///    the scan switched to a basin that does not reach the axis, which
  ///    happens once x is below the interpolation error of the table.
  /// Agreement of two levels does not stop the descent, since a fan from a
  /// corner of u_b looks converged at the coarse levels. Points are ranked
  /// by u_best so that a tie band wider than the separation of the
  /// candidates does not pick the wrong one.
  double boundary_trace(double t, double h = 0.0) const {
    auto extrapolate = [](double u1, double u4, double u16) {
      return (8.0 * u1 - 6.0 * u4 + u16) / 3.0;
    };
    auto u = [&](double x) { return u_best(x, t); };
    if (h > 0.0) return extrapolate(u(h), u(4.0 * h), u(16.0 * h));
    const double reach =
        t * std::max(1.0, p_.speed_bound(std::max(p_.u0_norm(), p_.ub_bar_norm())));
    h = std::min(4e-3 * p_.x_max(), 0.2 * reach) / 16.0;
    double u1 = u(h);
    double est = extrapolate(u1, u(4.0 * h), u(16.0 * h));
    const double eps = p_.tol().eps_adm;
    for (int level = 0;; ++level) {
      const double speed = std::max(1.0, std::abs(p_.flux().fprime(est)));
      if (h / 16.0 < 1e-9 * t * speed) break;
      const double hn = h / 16.0;
      const double v1 = u(hn);
      if (4.0 / 3.0 * eps / hn * std::abs(v1 - est) > 0.5 * p_.tol().tol_bln) break;
      if (level > 0 && std::abs(v1 - est) > 2.0 * std::abs(u1 - est) + 0.1 * p_.tol().tol_bln) {
        break;
      }
      h = hn;
      est = extrapolate(v1, u(4.0 * h), u1);
      u1 = v1;
    }
    return est;
  }

  SolutionField solve_grid(const std::vector<double>& xs,
                           const std::vector<double>& ts) const {
    SolutionField field;
    field.xs = xs;
    field.ts = ts;
    field.samples.resize(ts.size());
    field.jumps.resize(ts.size());
    field.boundary_layers.resize(ts.size());
    for (std::size_t j = 0; j < ts.size(); ++j) {
      auto& row = field.samples[j];
      row.reserve(xs.size());
      for (double x : xs) {
        row.push_back(try_point(x, ts[j]));
        if (!row.back().ok) ++field.failures;
      }
      field.jumps[j] = detect_jumps(row, &field.boundary_layers[j]);
    }
    return field;
  }

  /// Jumps on one level: successive differences that dominate the level's
  /// median variation, refined by bisection on the solution itself. A
  /// refinement ending with a negligible jump was a steep smooth region and
  /// is dropped; one ending at x = 0 goes to `layers`.
  std::vector<Jump> detect_jumps(const std::vector<SolutionSample>& row,
                                 std::vector<Jump>* layers = nullptr) const {
    std::vector<Jump> out;
    const std::size_t n = row.size();
    if (n < 3) return out;
    std::vector<double> d(n - 1);
    double umax = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      d[i] = (row[i].ok && row[i + 1].ok) ? std::abs(row[i + 1].u - row[i].u)
                                           : 0.0;
      if (row[i].ok) umax = std::max(umax, std::abs(row[i].u));
    }
    std::vector<double> sorted = d;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                     sorted.end());
    const double median = sorted[sorted.size() / 2];
    const double threshold =
        std::max(10.0 * median, opts_.jump_floor * (1.0 + umax));
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (d[i] <= threshold) continue;
      // Local maximum against the neighbours two cells away; a smooth steep
      // region has comparable differences there.
      const double l2 = i >= 2 ? d[i - 2] : 0.0;
      const double r2 = i + 2 < d.size() ? d[i + 2] : 0.0;
      if (d[i] < 2.0 * std::max(l2, r2)) continue;
      if (i > 0 && d[i - 1] > d[i]) continue;
      if (i + 1 < d.size() && d[i + 1] >= d[i]) continue;
      const Jump jm = refine_jump(row[i], row[i + 1]);
      if (std::abs(jm.u_left - jm.u_right) <=
          0.5 * opts_.jump_floor * (1.0 + umax)) {
        continue;
      }
      if (jm.x <= p_.tol().arg_tol) {
        if (layers) layers->push_back(jm);
        continue;
      }
      out.push_back(jm);
    }
    return out;
  }

  /// Shrinks [left.x, right.x] around the discontinuity.
  Jump refine_jump(const SolutionSample& left,
                   const SolutionSample& right) const {
    double xl = left.x, xr = right.x;
    double ul = left.u, ur = right.u;
    const double t = left.t;
    for (int it = 0; it < opts_.refine_iterations; ++it) {
      if (xr - xl <= 1e-10 * (1.0 + xr)) break;
      const double xm = 0.5 * (xl + xr);
      const double um = u_best(xm, t);
      if (std::abs(um - ul) <= std::abs(um - ur)) {
        xl = xm;
        ul = um;
      } else {
        xr = xm;
        ur = um;
      }
    }
    return {t, 0.5 * (xl + xr), ul, ur};
  }

 private:
  const Problem& p_;
  const BoundaryTable* table_;
  SolverOptions opts_;
  Functional fn_;
};

struct Bump {
  double xc, tc, rx, rt;
};

namespace detail {

inline double bump1(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - s * s));
}

inline double bump1_prime(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double q = 1.0 - s * s;
  return bump1(s) * (-2.0 * s / (q * q));
}

}  // namespace detail

/// Random bumps supported strictly inside (0, x_hi) x (0, t_hi).
inline std::vector<Bump> random_bumps(int n, double x_hi, double t_hi,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<Bump> out;
  for (int i = 0; i < n; ++i) {
    const double rx = x_hi * (0.05 + 0.15 * uni(rng));
    const double rt = t_hi * (0.05 + 0.15 * uni(rng));
    const double xc = rx + 2e-2 * x_hi + (x_hi - 2.0 * rx - 4e-2 * x_hi) * uni(rng);
    const double tc = rt + 2e-2 * t_hi + (t_hi - 2.0 * rt - 4e-2 * t_hi) * uni(rng);
    out.push_back({xc, tc, rx, rt});
  }
  return out;
}

/// max over bumps of |int int u phi_t + f(u) phi_x + alpha u phi|. Rows are
/// integrated in x with cells containing a detected jump split at the jump;
/// the row integrals are combined by the trapezoid rule in t.
inline double weak_residual(const SolutionField& field, const Problem& p,
                            const std::vector<Bump>& bumps) {
  const auto& xs = field.xs;
  const auto& ts = field.ts;
  const auto& f = p.flux();
  double worst = 0.0;
  for (const auto& b : bumps) {
    auto integrand = [&](double x, double t, double u) {
      const double sx = (x - b.xc) / b.rx, st = (t - b.tc) / b.rt;
      const double px = detail::bump1(sx), pt = detail::bump1(st);
      if (px == 0.0 || pt == 0.0) return 0.0;
      const double phi = px * pt;
      const double phi_x = detail::bump1_prime(sx) / b.rx * pt;
      const double phi_t = px * detail::bump1_prime(st) / b.rt;
      return u * phi_t + f.f(u) * phi_x + p.source().alpha(t) * u * phi;
    };
    std::vector<double> rows(ts.size(), 0.0);
    for (std::size_t j = 0; j < ts.size(); ++j) {
      const double t = ts[j];
      if (std::abs(t - b.tc) >= b.rt) continue;
      const auto& row = field.samples[j];
      const auto& jumps = field.jumps[j];
      double acc = 0.0;
      for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double x0 = xs[i], x1 = xs[i + 1];
        if (x1 <= b.xc - b.rx || x0 >= b.xc + b.rx) continue;
        const double u0 = row[i].u, u1 = row[i + 1].u;
        const Jump* jp = nullptr;
        for (const auto& jm : jumps) {
          if (jm.x > x0 && jm.x < x1) jp = &jm;
        }
        if (jp) {
          const double xs_ = jp->x;
          acc += 0.5 * (xs_ - x0) *
                 (integrand(x0, t, u0) + integrand(xs_, t, u0));
          acc += 0.5 * (x1 - xs_) *
                 (integrand(xs_, t, u1) + integrand(x1, t, u1));
        } else {
          acc += 0.5 * (x1 - x0) * (integrand(x0, t, u0) + integrand(x1, t, u1));
        }
      }
      rows[j] = acc;
    }
    double total = 0.0;
    for (std::size_t j = 0; j + 1 < ts.size(); ++j) {
      total += 0.5 * (ts[j + 1] - ts[j]) * (rows[j] + rows[j + 1]);
    }
    worst = std::max(worst, std::abs(total));
  }
  return worst;
}

}  // namespace laxol
