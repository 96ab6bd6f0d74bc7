#pragma once

/// \file
/// W(0, t) by dynamic programming over boundary-follow steps, loops that
/// leave and re-enter the axis, and direct curves from the initial line;
/// boundary-point classification and the BLN verdict.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "laxol/boundary_table.hpp"
#include "laxol/functional.hpp"
#include "laxol/numerics.hpp"
#include "laxol/problem.hpp"

namespace laxol {

inline double effective_boundary(double ub, double lambda_f) {
  return std::max(ub, lambda_f);
}

struct TableOptions {
  int nodes = 1024;
  /// Scan cells for the direct-from-initial mechanism.
  int direct_scan_cells = 512;
  /// Relative band inside which mechanisms count as tied; ties prefer
  /// follow, then loop, then direct.
  double tie_rel = 1e-14;
};

namespace detail {

/// int_a^b f(ub_bar) e^{-beta}; exact moments for piecewise-constant u_b.
inline long double follow_cost(const Problem& p, double a, double b) {
  if (b <= a) return 0.0L;
  const auto& ub = p.ub();
  if (ub.is_piecewise_constant()) {
    long double acc = 0.0L;
    double lo = a;
    auto piece = [&](double x0, double x1) {
      const double fv = p.flux().f(p.ub_bar(0.5 * (x0 + x1)));
      if (fv != 0.0) {
        acc += static_cast<long double>(fv) * p.source().moment(-1, x0, x1);
      }
    };
    for (double brk : ub.breaks()) {
      if (brk <= lo) continue;
      if (brk >= b) break;
      piece(lo, brk);
      lo = brk;
    }
    piece(lo, b);
    return acc;
  }
  return laxol::integrate(
      [&](double s) { return p.flux().f(p.ub_bar(s)) / p.source().exp_beta(s); },
      a, b, p.tol().tol_quad, p.time_breaks());
}

}  // namespace detail

/// Builds the table on a uniform grid of `opts.nodes` steps over [0, t_max].
inline BoundaryTable build_table(const Problem& p, TableOptions opts = {}) {
  if (opts.nodes < 1) throw ConfigError("build_table: need >= 1 step");
  const auto& hc = p.curves();
  const auto& src = p.source();
  const auto& flux = p.flux();
  const std::size_t n = static_cast<std::size_t>(opts.nodes) + 1;
  BoundaryTable tab;
  tab.t = linspace(0.0, p.t_max(), n);
  tab.W.assign(n, 0.0L);
  tab.mechanism.assign(n, Mechanism::Start);
  tab.from.assign(n, -1);
  tab.arg.assign(n, 0.0);
  tab.ub_bar.resize(n);
  for (std::size_t k = 0; k < n; ++k) tab.ub_bar[k] = p.ub_bar(tab.t[k]);

  // Cumulative moment excesses at the nodes, orders -1 .. degree - 1.
  const int deg = static_cast<int>(flux.degree());
  std::vector<std::vector<long double>> cum(
      static_cast<std::size_t>(deg + 1), std::vector<long double>(n, 0.0L));
  for (int m = -1; m < deg; ++m) {
    auto& c = cum[static_cast<std::size_t>(m + 1)];
    for (std::size_t k = 0; k + 1 < n; ++k) {
      c[k + 1] = c[k] + src.moment_excess(m, tab.t[k], tab.t[k + 1]);
    }
  }
  auto moments = [&](std::size_t j, std::size_t k) {
    HCurves::MomentSet ms;
    ms.m.resize(static_cast<std::size_t>(deg + 1));
    const long double T = static_cast<long double>(tab.t[k]) - tab.t[j];
    for (int m = -1; m < deg; ++m) {
      const auto& c = cum[static_cast<std::size_t>(m + 1)];
      ms.m[static_cast<std::size_t>(m + 1)] = T + (c[k] - c[j]);
    }
    return ms;
  };
  const auto& coeffs = flux.coefficients();
  // X(t_i) of the loop from t_j with parameter y0.
  auto loop_position = [&](std::size_t j, std::size_t i, double y0) {
    long double acc = 0.0L, yp = 1.0L;
    const long double T = static_cast<long double>(tab.t[i]) - tab.t[j];
    for (int k = 1; k <= deg; ++k) {
      const auto& c = cum[static_cast<std::size_t>(k)];
      acc += static_cast<long double>(k) * coeffs[static_cast<std::size_t>(k)] *
             yp * (T + (c[i] - c[j]));
      yp *= y0;
    }
    return acc;
  };

  std::vector<long double> follow(n, 0.0L);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    follow[k] = detail::follow_cost(p, tab.t[k], tab.t[k + 1]);
  }

  Functional direct(p, nullptr, {.scan_cells = opts.direct_scan_cells});
  const double lam = flux.lambda_f();
  struct Loop {
    long double value;
    std::size_t j;
    double y0;
  };
  std::vector<Loop> loops;
  for (std::size_t k = 1; k < n; ++k) {
    // (a) follow the boundary over one step.
    long double best = tab.W[k - 1] - follow[k - 1];
    Mechanism mech = Mechanism::Follow;
    int from = static_cast<int>(k - 1);
    double arg = 0.0;
    auto tie_band = [&](long double a, long double b) {
      return static_cast<long double>(opts.tie_rel) *
             (1.0L + std::abs(a - b) + std::abs(follow[k - 1]));
    };

    // (b) loops from earlier nodes, cheapest first; only the node positions
    // are screened before the full admissibility test.
    loops.clear();
    for (std::size_t j = 0; j < k; ++j) {
      const auto ms = moments(j, k);
      std::pair<double, double> bracket{lam, lam};
      if (!flux.is_quadratic()) bracket = hc.y0_bracket(0.0, tab.t[j], tab.t[k]);
      const double y0 = hc.y0_from_moments(ms, 0.0L, bracket);
      const long double v = tab.W[j] + hc.cost_from_moments(ms, y0, 0.0L);
      if (v < best - tie_band(v, best)) loops.push_back({v, j, y0});
    }
    std::sort(loops.begin(), loops.end(),
              [](const Loop& a, const Loop& b) { return a.value < b.value; });
    for (const auto& lp : loops) {
      bool ok = true;
      const long double eps = hc.eps_adm(0.0);
      for (std::size_t i = lp.j + 1; i < k && ok; ++i) {
        if (loop_position(lp.j, i, lp.y0) < -eps) ok = false;
      }
      if (ok) {
        HCurveSpec spec;
        spec.y0 = lp.y0;
        spec.t_lo = tab.t[lp.j];
        spec.t_hi = tab.t[k];
        spec.kind = CurveKind::ToBoundary;
        ok = hc.admissible_boundary_curve(spec, 0.0);
      }
      if (ok) {
        best = lp.value;
        mech = Mechanism::Loop;
        from = static_cast<int>(lp.j);
        break;
      }
    }

    // (c) direct curve from the initial line, skipped when a lower bound on
    // A(., 0, t) cannot beat the current best.
    const double tk = tab.t[k];
    const auto [ylo, yhi] = direct.y_range(0.0, tk);
    const long double lower =
        -static_cast<long double>(p.u0_norm()) * yhi -
        static_cast<long double>(flux.f(0.0)) * src.moment(-1, 0.0, tk);
    if (lower < best) {
      const auto res = direct.minimize_A(0.0, tk);
      if (res.feasible) {
        const long double v = direct.A_ld(res.hi, 0.0, tk);
        if (v < best - tie_band(v, best)) {
          best = v;
          mech = Mechanism::InitialDirect;
          from = -1;
          arg = res.hi;
        }
      }
    }
    tab.W[k] = best;
    tab.mechanism[k] = mech;
    tab.from[k] = from;
    tab.arg[k] = arg;
  }
  return tab;
}

enum class BoundaryType { Initial, Type1, Type2, Type3Suspected, Start };

inline const char* boundary_type_name(BoundaryType t) {
  switch (t) {
    case BoundaryType::Initial: return "initial";
    case BoundaryType::Type1: return "Type1";
    case BoundaryType::Type2: return "Type2";
    case BoundaryType::Type3Suspected: return "Type3-suspected";
    case BoundaryType::Start: return "start";
  }
  return "?";
}

/// Number of switches between follow runs and loop runs along the
/// chain of winning steps that ends at node k.
inline int chain_alternations(const BoundaryTable& tab, std::size_t k) {
  int switches = 0;
  Mechanism last = Mechanism::Start;
  std::size_t i = k;
  while (true) {
    const Mechanism m = tab.mechanism[i];
    if (m != Mechanism::Follow && m != Mechanism::Loop) break;
    if (last != Mechanism::Start && m != last) ++switches;
    last = m;
    const int j = tab.from[i];
    if (j < 0) break;
    i = static_cast<std::size_t>(j);
  }
  return switches;
}

/// Classification of the boundary point at time t. A chain alternating at
/// least `min_alternations` times on every supplied refinement level marks
/// the point Type3-suspected.
inline BoundaryType classify(const std::vector<const BoundaryTable*>& levels,
                             double t, int min_alternations = 3) {
  if (levels.empty()) throw ConfigError("classify: no table supplied");
  bool alternating = true;
  for (const auto* tab : levels) {
    if (chain_alternations(*tab, tab->node_of(t)) < min_alternations) {
      alternating = false;
    }
  }
  if (alternating) return BoundaryType::Type3Suspected;
  const auto& tab = *levels.front();
  switch (tab.mechanism[tab.node_of(t)]) {
    case Mechanism::Follow: return BoundaryType::Type1;
    case Mechanism::Loop: return BoundaryType::Type2;
    case Mechanism::InitialDirect: return BoundaryType::Initial;
    case Mechanism::Start: return BoundaryType::Start;
  }
  return BoundaryType::Start;
}

inline BoundaryType classify(const BoundaryTable& tab, double t) {
  return classify(std::vector<const BoundaryTable*>{&tab}, t);
}

struct BlnVerdict {
  bool pass = false;
  double t = 0.0;
  double u_trace = 0.0;
  double ub_bar = 0.0;
  std::string detail;
};

inline BlnVerdict bln_check(double u_trace, double t, const Problem& p) {
  BlnVerdict v;
  v.t = t;
  v.u_trace = u_trace;
  v.ub_bar = p.ub_bar(t);
  const double tol = p.tol().tol_bln;
  const auto& f = p.flux();
  std::ostringstream msg;
  if (std::abs(u_trace - v.ub_bar) <= tol) {
    v.pass = true;
    msg << "trace matches ub_bar";
  } else if (f.fprime(u_trace) <= tol && f.f(u_trace) >= f.f(v.ub_bar) - tol) {
    v.pass = true;
    msg << "outgoing trace: f'(u) = " << f.fprime(u_trace)
        << ", f(u) - f(ub_bar) = " << f.f(u_trace) - f.f(v.ub_bar);
  } else {
    msg << "violated: |u - ub_bar| = " << std::abs(u_trace - v.ub_bar)
        << ", f'(u) = " << f.fprime(u_trace)
        << ", f(u) - f(ub_bar) = " << f.f(u_trace) - f.f(v.ub_bar);
  }
  v.detail = msg.str();
  return v;
}

struct ThreePieceResult {
  double value = kInf;
  bool hypothesis = true;
  double t1 = 0.0, t2 = 0.0, y = 0.0;
};

/// Direct minimization of the at-most-three-piece functional: a leg from
/// (y, 0) to (0, t1), the boundary from t1 to t2, and a leg from (0, t2) to
/// (x, t); curves that never touch the axis enter through A(x, t).
inline ThreePieceResult three_piece_value(double x, double t, const Problem& p,
                                          int n_t2 = 32, int n_t1 = 32,
                                          int y_cells = 64) {
  ThreePieceResult out;
  out.hypothesis = p.three_piece_hypothesis();
  Functional fn(p, nullptr, {.scan_cells = y_cells});
  const auto& hc = p.curves();
  auto follow = [&](double a, double b) {
    if (b <= a) return 0.0;
    return laxol::integrate(
        [&](double s) { return p.flux().f(p.ub_bar(s)) / p.source().exp_beta(s); },
        a, b, p.tol().tol_quad, p.time_breaks());
  };
  // D(t1): best arrival on the axis at t1 straight from the initial line.
  auto arrive = [&](double t1) -> std::pair<double, double> {
    if (t1 <= 0.0) return {0.0, 0.0};
    const auto r = fn.minimize_A(0.0, t1);
    return r.feasible ? std::pair{r.value, r.hi} : std::pair{kInf, 0.0};
  };
  // D on a fixed grid, shared by every t2.
  const auto t1_grid = linspace(0.0, t, static_cast<std::size_t>(n_t1) + 1);
  std::vector<double> d_grid(t1_grid.size());
  for (std::size_t i = 0; i < t1_grid.size(); ++i) {
    d_grid[i] = arrive(t1_grid[i]).first;
  }
  // G(t2) = min over t1 <= t2 of D(t1) - follow(t1, t2).
  auto on_axis = [&](double t2, double* t1_out, double* y_out) {
    auto g = [&](double t1) { return arrive(t1).first - follow(t1, t2); };
    MinimumPoint best{t2, g(t2)};
    std::size_t bi = 0;
    double bv = kInf;
    for (std::size_t i = 0; i < t1_grid.size() && t1_grid[i] <= t2; ++i) {
      const double v = d_grid[i] - follow(t1_grid[i], t2);
      if (v < bv) {
        bv = v;
        bi = i;
      }
    }
    if (bv < best.value) best = {t1_grid[bi], bv};
    const double a = bi > 0 ? t1_grid[bi - 1] : 0.0;
    const double b = std::min(bi + 1 < t1_grid.size() ? t1_grid[bi + 1] : t, t2);
    if (b > a) {
      const auto gm = minimize_1d(g, a, b);
      if (gm.value < best.value) best = gm;
    }
    if (t1_out) *t1_out = best.x;
    if (y_out) *y_out = arrive(best.x).second;
    return best.value;
  };
  auto total = [&](double t2) {
    double leg = 0.0;
    if (x > 0.0 || t2 < t) {
      const auto spec = hc.solve_h(x, t, 0.0, t2);
      if (!hc.admissible_boundary_curve(spec, x)) return kInf;
      leg = static_cast<double>(hc.cost(spec));
    }
    return on_axis(t2, nullptr, nullptr) + leg;
  };
  // The last leg needs t2 < t for x > 0; cluster samples toward t.
  std::vector<double> t2s;
  for (int i = 0; i < n_t2; ++i) {
    const double r = 1.0 - static_cast<double>(i) / n_t2;
    t2s.push_back(t - t * r * r);
  }
  if (x == 0.0) t2s.push_back(t);
  std::vector<double> vals(t2s.size());
  for (std::size_t i = 0; i < t2s.size(); ++i) vals[i] = total(t2s[i]);
  const std::size_t i = static_cast<std::size_t>(
      std::min_element(vals.begin(), vals.end()) - vals.begin());
  MinimumPoint best{t2s[i], vals[i]};
  const double a = i > 0 ? t2s[i - 1] : t2s[i];
  const double b = i + 1 < t2s.size()
                       ? t2s[i + 1]
                       : (x > 0.0 ? t - 1e-6 * (t - t2s[i]) : t2s[i]);
  if (b > a) {
    const auto gm = minimize_1d(total, a, b);
    if (gm.value < best.value) best = gm;
  }
  out.value = best.value;
  out.t2 = best.x;
  on_axis(best.x, &out.t1, &out.y);
  if (x > 0.0) {
    const auto direct = fn.minimize_A(x, t);
    if (direct.feasible && direct.value < out.value) {
      out.value = direct.value;
      out.t1 = out.t2 = 0.0;
      out.y = direct.hi;
    }
  }
  return out;
}

}  // namespace laxol
