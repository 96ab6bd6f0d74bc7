#pragma once

/// \file
/// Initial and boundary functionals A(y, x, t), B(tau, x, t), their
/// constrained minimization and the value function W = min{A, B}.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "laxol/boundary_table.hpp"
#include "laxol/hcurve.hpp"
#include "laxol/numerics.hpp"
#include "laxol/problem.hpp"

namespace laxol {

enum class Branch { Initial, Boundary, Tie };

inline const char* branch_name(Branch b) {
  switch (b) {
    case Branch::Initial: return "initial";
    case Branch::Boundary: return "boundary";
    case Branch::Tie: return "tie";
  }
  return "?";
}

struct Candidate {
  double arg = 0.0;
  double value = kInf;
  /// y0 of the h-curve realizing this candidate.
  double h = 0.0;
  /// value minus the offset the search measured from; keeps the digits
  /// that rounding to value loses when the offset is large.
  double excess = kInf;
};

struct MinimizationResult {
  bool feasible = false;
  double value = kInf;
  double lo = std::numeric_limits<double>::quiet_NaN();
  double hi = std::numeric_limits<double>::quiet_NaN();
  double h_lo = 0.0, h_hi = 0.0;
  Branch branch = Branch::Initial;
  /// Polished basin minima within the value band, sorted by argument.
  std::vector<Candidate> candidates;
};

struct ValueResult {
  double W = kInf;
  Branch branch = Branch::Initial;
  MinimizationResult A, B;
};

struct FunctionalOptions {
  /// Scan cells; 0 takes the problem's scan_cells.
  int scan_cells = 0;
  int max_basins = 16;
  /// Number of edge expansions of the y range when the argmin sits there.
  int max_expansions = 6;
};

namespace detail {

/// Global minimization of a 1-D objective sampled at `xs` (increasing):
/// every local minimum of the samples is polished by golden section, and
/// the candidates within the value band are returned.
template <typename F>
MinimizationResult scan_minimize(const F& obj, const std::vector<double>& xs,
                                 double val_tol, int max_basins,
                                 double upper_cap, double offset = 0.0) {
  MinimizationResult out;
  const std::size_t n = xs.size();
  std::vector<double> vs(n);
  for (std::size_t i = 0; i < n; ++i) vs[i] = obj(xs[i]).first;
  std::vector<std::size_t> minima;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(vs[i])) continue;
    const double left = i > 0 ? vs[i - 1] : kInf;
    const double right = i + 1 < n ? vs[i + 1] : kInf;
    if (vs[i] <= left && vs[i] <= right) {
      // Plateau: keep only its first point.
      if (i > 0 && vs[i] == left) continue;
      minima.push_back(i);
    }
  }
  if (minima.empty()) return out;
  std::sort(minima.begin(), minima.end(),
            [&](std::size_t a, std::size_t b) { return vs[a] < vs[b]; });
  if (minima.size() > static_cast<std::size_t>(max_basins)) {
    minima.resize(static_cast<std::size_t>(max_basins));
  }
  std::vector<Candidate> cands;
  for (std::size_t i : minima) {
    const double a = i > 0 ? xs[i - 1] : xs[i];
    const double b = i + 1 < n ? xs[i + 1] : std::max(xs[i], upper_cap);
    Candidate c{xs[i], vs[i], obj(xs[i]).second};
    if (b > a) {
      auto f = [&](double z) { return obj(z).first; };
      const auto g = minimize_1d(f, a, b);
      if (g.value < c.value) c = {g.x, g.value, obj(g.x).second};
    }
    cands.push_back(c);
  }
  double best = kInf;
  for (const auto& c : cands) best = std::min(best, c.value);
  const double band = val_tol * (1.0 + std::abs(best + offset));
  for (auto c : cands) {
    if (c.value > best + band) continue;
    c.excess = c.value;
    c.value += offset;
    out.candidates.push_back(c);
  }
  std::sort(out.candidates.begin(), out.candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.arg < b.arg; });
  // Merge polished copies of the same basin.
  std::vector<Candidate> merged;
  for (const auto& c : out.candidates) {
    if (!merged.empty() &&
        std::abs(c.arg - merged.back().arg) <= 1e-9 * (1.0 + std::abs(c.arg))) {
      if (c.excess < merged.back().excess) merged.back() = c;
      continue;
    }
    merged.push_back(c);
  }
  out.candidates = std::move(merged);
  out.feasible = true;
  out.value = best + offset;
  out.lo = out.candidates.front().arg;
  out.hi = out.candidates.back().arg;
  out.h_lo = out.candidates.front().h;
  out.h_hi = out.candidates.back().h;
  return out;
}

}  // namespace detail

class Functional {
 public:
  Functional(const Problem& problem, const BoundaryTable* table,
             FunctionalOptions opts = {})
      : p_(problem), table_(table), opts_(opts) {
    if (opts_.scan_cells <= 0) opts_.scan_cells = p_.tol().scan_cells;
    speed_cap_ = std::max(
        1.0, p_.speed_bound(std::max(p_.u0_norm(), p_.ub_bar_norm())));
  }

  const Problem& problem() const { return p_; }
  const BoundaryTable* table() const { return table_; }
  int scan_cells() const { return opts_.scan_cells; }
  double val_band(double w) const {
    return p_.tol().val_tol * (1.0 + std::abs(w));
  }

  long double A_ld(double y, double x, double t) const {
    const auto spec = p_.curves().solve_h(x, t, y, 0.0);
    return p_.curves().cost(spec) + static_cast<long double>(p_.U0(y));
  }

  double A_functional(double y, double x, double t) const {
    check_point(x, t);
    if (y < 0.0) throw ConfigError("A_functional: y must be >= 0");
    return static_cast<double>(A_ld(y, x, t));
  }

  /// The integration-by-parts form of A:
  /// U0(y) - int_x^y h(x - z, t) dz - int_0^t e^{-beta} f(h(0, t) e^beta).
  double A_alternative(double y, double x, double t) const {
    const auto& hc = p_.curves();
    const double h0 = hc.solve_h(0.0, t, 0.0, 0.0).y0;
    const double tail = p_.source().integrate(
        [&](double s) {
          const double eb = p_.source().exp_beta(s);
          return p_.flux().f(h0 * eb) / eb;
        },
        0.0, t);
    auto h_of = [&](double z) { return hc.solve_h(x, t, z, 0.0).y0; };
    double mid = 0.0;
    if (y != x) {
      const double lo = std::min(x, y), hi = std::max(x, y);
      mid = laxol::integrate(h_of, lo, hi, p_.tol().tol_quad);
      if (y < x) mid = -mid;
    }
    return p_.U0(y) - mid - tail;
  }

  long double B_ld(double tau, double x, double t) const {
    require_table("B_functional");
    const auto spec = p_.curves().solve_h(x, t, 0.0, tau);
    return p_.curves().cost(spec) + table_->value_at(tau);
  }

  double B_functional(double tau, double x, double t) const {
    check_point(x, t);
    if (!(tau >= 0.0 && tau < t)) {
      throw ConfigError("B_functional: need 0 <= tau < t");
    }
    return static_cast<double>(B_ld(tau, x, t));
  }

  /// A restricted to H_I: (value, y0), +inf when the curve leaves Q.
  std::pair<double, double> objective_A(double y, double x, double t) const {
    const auto& hc = p_.curves();
    const auto spec = hc.solve_h(x, t, y, 0.0);
    if (!hc.admissible_initial_curve(spec, x, p_.tol().initial_mode)) {
      return {kInf, spec.y0};
    }
    return {static_cast<double>(hc.cost(spec) +
                                static_cast<long double>(p_.U0(y))),
            spec.y0};
  }

  std::pair<double, double> objective_B(double tau, double x,
                                        double t) const {
    const auto& hc = p_.curves();
    const auto spec = hc.solve_h(x, t, 0.0, tau);
    if (!hc.admissible_boundary_curve(spec, x)) return {kInf, spec.y0};
    return {static_cast<double>(hc.cost(spec) + table_->value_at(tau)),
            spec.y0};
  }

  /// Search window for initial points, from the data bound of u0.
  std::pair<double, double> y_range(double x, double t) const {
    const double s =
        p_.speed_bound(std::max(p_.u0_norm(), std::abs(p_.flux().lambda_f())));
    const double reach = t * s + 1e-2 * (1.0 + x);
    return {std::max(0.0, x - reach), x + reach};
  }

  MinimizationResult minimize_A(double x, double t) const {
    check_point(x, t);
    auto [lo, hi] = y_range(x, t);
    auto obj = [&](double y) { return objective_A(y, x, t); };
    MinimizationResult res;
    for (int e = 0; e <= opts_.max_expansions; ++e) {
      const auto ys =
          linspace(lo, hi, static_cast<std::size_t>(opts_.scan_cells) + 1);
      res = detail::scan_minimize(obj, ys, p_.tol().val_tol, opts_.max_basins,
                                  hi);
      const double cell = (hi - lo) / opts_.scan_cells;
      if (!res.feasible || res.hi < hi - cell) break;
      hi += 2.0 * (hi - lo);
    }
    res.branch = Branch::Initial;
    return res;
  }

  /// Minimization of B over tau in [tau_min, t).
  MinimizationResult minimize_B(double x, double t,
                                double tau_min = 0.0) const {
    check_point(x, t);
    MinimizationResult res;
    res.branch = Branch::Boundary;
    if (!table_) return res;
    const int n = opts_.scan_cells;
    const double span = t - tau_min;
    std::vector<double> taus;
    taus.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double r = 1.0 - static_cast<double>(i) / n;
      taus.push_back(t - span * r * r);
    }
    // Geometric tail towards t: a characteristic of speed up to S leaves the
    // axis at t - x / S, far inside the last uniform cell when S is large.
    double d = span / (static_cast<double>(n) * n);
    const double d_min = 0.25 * x / speed_cap_;
    while (d > d_min && d > 1e-15 * (1.0 + t)) {
      d *= 0.5;
      taus.push_back(t - d);
    }
    // Measured from W(0, t): the curvature in tau is resolved only when the
    // objective is not swamped by a large table value.
    const auto& hc = p_.curves();
    auto obj = [&](double tau) -> std::pair<double, double> {
      const auto spec = hc.solve_h(x, t, 0.0, tau);
      if (!hc.admissible_boundary_curve(spec, x)) return {kInf, spec.y0};
      return {static_cast<double>(hc.cost(spec) + table_->value_gap(tau, t)),
              spec.y0};
    };
    const double cap = t - std::min(1e-3 * span / (static_cast<double>(n) * n), 0.5 * d);
    res = detail::scan_minimize(obj, taus, p_.tol().val_tol, opts_.max_basins,
                                cap, static_cast<double>(table_->value_at(t)));
    res.branch = Branch::Boundary;
    if (x == 0.0) {
      // The degenerate limit tau -> t: the point simply sits on the axis.
      const double w = static_cast<double>(table_->value_at(t));
      const Candidate lim{t, w, p_.ub_bar(t) / p_.source().exp_beta(t), 0.0};
      if (!res.feasible || w < res.value - val_band(w)) {
        res.feasible = true;
        res.value = w;
        res.candidates = {lim};
      } else if (w <= res.value + val_band(res.value)) {
        res.candidates.push_back(lim);
      }
      res.lo = res.candidates.front().arg;
      res.hi = res.candidates.back().arg;
      res.h_lo = res.candidates.front().h;
      res.h_hi = res.candidates.back().h;
    }
    return res;
  }

  ValueResult value(double x, double t) const {
    ValueResult out;
    out.A = minimize_A(x, t);
    out.B = minimize_B(x, t);
    if (!out.A.feasible && !out.B.feasible) {
      std::ostringstream msg;
      msg << "value: both branches infeasible at (x, t) = (" << x << ", " << t
          << ")";
      throw ConfigError(msg.str());
    }
    const double a = out.A.value, b = out.B.value;
    out.W = std::min(a, b);
    if (out.A.feasible && out.B.feasible &&
        std::abs(a - b) <= val_band(out.W)) {
      out.branch = Branch::Tie;
    } else {
      out.branch = a < b ? Branch::Initial : Branch::Boundary;
    }
    return out;
  }

  struct DppReport {
    double W = 0.0;
    double via = 0.0;
    double residual = 0.0;
  };

  /// |W(x,t) - min over intermediate states|, where the intermediate state is
  /// either (z, s) with z >= 0 or a boundary time tau in [s, t).
  DppReport dpp(double x, double t, double s, int z_cells = 128) const {
    if (!(s > 0.0 && s < t)) throw ConfigError("dpp_residual: need 0 < s < t");
    DppReport rep;
    rep.W = value(x, t).W;
    const auto& hc = p_.curves();
    const double speed =
        p_.speed_bound(std::max({p_.u0_norm(), p_.ub_bar_norm(),
                                 std::abs(p_.flux().lambda_f())}));
    const double reach = (t - s) * speed + 1e-2 * (1.0 + x);
    const double lo = std::max(0.0, x - reach), hi = x + reach;
    auto obj = [&](double z) -> std::pair<double, double> {
      const auto leg = hc.solve_h(x, t, z, s);
      if (hc.curve_min(leg).value < -hc.eps_adm(x)) return {kInf, leg.y0};
      return {static_cast<double>(hc.cost(leg)) + value(z, s).W, leg.y0};
    };
    const auto zs = linspace(lo, hi, static_cast<std::size_t>(z_cells) + 1);
    const auto zres =
        detail::scan_minimize(obj, zs, p_.tol().val_tol, 4, hi);
    double via = zres.value;
    if (table_) {
      const auto bres = minimize_B(x, t, s);
      if (bres.feasible) via = std::min(via, bres.value);
    }
    rep.via = via;
    rep.residual = std::abs(rep.W - via);
    return rep;
  }

  double dpp_residual(double x, double t, double s, int z_cells = 128) const {
    return dpp(x, t, s, z_cells).residual;
  }

 private:
  void check_point(double x, double t) const {
    if (!(x >= 0.0) || !std::isfinite(x) || !(t > 0.0) ||
        t > p_.t_max() * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "point (x, t) = (" << x << ", " << t << ") outside the domain";
      throw ConfigError(msg.str());
    }
  }

  void require_table(const char* what) const {
    if (!table_) {
      throw ConfigError(std::string(what) + ": no boundary table supplied");
    }
  }

  const Problem& p_;
  const BoundaryTable* table_;
  FunctionalOptions opts_;
  double speed_cap_ = 1.0;
};

}  // namespace laxol
