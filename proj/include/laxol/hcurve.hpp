#pragma once

/// \file
/// h-curves: X'(theta) = f'(y0 e^{beta(theta)}). Solving for y0, evaluating
/// positions and action costs, and testing whether a curve stays in the
/// quarter plane.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include "laxol/flux.hpp"
#include "laxol/numerics.hpp"
#include "laxol/source.hpp"

namespace laxol {

enum class CurveKind { ToInitial, ToBoundary, Interior };

struct HCurveSpec {
  double y0 = 0.0;
  double t_lo = 0.0, t_hi = 0.0;
  double x_lo = 0.0, x_hi = 0.0;
  CurveKind kind = CurveKind::Interior;
  /// False when the two-sided y0 estimate had to be widened.
  bool bracket_valid = true;
};

enum class AdmissibilityMode { Containment, StrictPartialIntegral };

struct HCurveOptions {
  double tol = 1e-11;
  int samples = 256;
  /// Admissibility band is eps_adm * (1 + |x|).
  double eps_adm = 1e-8;
  AdmissibilityMode initial_mode = AdmissibilityMode::Containment;
};

class HCurves {
 public:
  HCurves(const FluxModel& flux, const SourceModel& source,
          HCurveOptions opts = {})
      : flux_(flux), source_(source), opts_(opts) {
    if (static_cast<int>(flux_.degree()) - 1 > source_.max_moment()) {
      throw ConfigError(
          "hcurve: source moment cache too short for the flux degree");
    }
  }

  const FluxModel& flux() const { return flux_; }
  const SourceModel& source() const { return source_; }
  const HCurveOptions& options() const { return opts_; }

  /// Moments M_m = int_a^b e^{m beta} for m = -1 .. degree - 1; entry i
  /// holds order i - 1.
  struct MomentSet {
    std::vector<long double> m;
    long double at(int order) const {
      return m[static_cast<std::size_t>(order + 1)];
    }
  };

  MomentSet moments(double a, double b) const {
    MomentSet out;
    out.m.resize(flux_.degree() + 1);
    for (int k = -1; k < static_cast<int>(flux_.degree()); ++k) {
      out.m[static_cast<std::size_t>(k + 1)] = source_.moment(k, a, b);
    }
    return out;
  }

  /// int f'(y e^beta) over the interval the moments describe.
  long double displacement(double y, const MomentSet& ms) const {
    const auto& c = flux_.coefficients();
    long double acc = 0.0L, yp = 1.0L;
    for (std::size_t k = 1; k < c.size(); ++k) {
      acc += static_cast<long double>(k) * c[k] * yp *
             ms.at(static_cast<int>(k) - 1);
      yp *= y;
    }
    return acc;
  }

  /// d/dy of displacement: int f''(y e^beta) e^beta.
  long double displacement_slope(double y, const MomentSet& ms) const {
    const auto& c = flux_.coefficients();
    long double acc = 0.0L, yp = 1.0L;
    for (std::size_t k = 2; k < c.size(); ++k) {
      acc += static_cast<long double>(k * (k - 1)) * c[k] * yp *
             ms.at(static_cast<int>(k) - 1);
      yp *= y;
    }
    return acc;
  }

  long double displacement(double y, double a, double b) const {
    if (flux_.degree() == 2) {
      const auto& c = flux_.coefficients();
      return c[1] * (static_cast<long double>(b) - a) +
             2.0L * c[2] * y * source_.moment(1, a, b);
    }
    return displacement(y, moments(a, b));
  }

  /// Unique y0 with displacement(y0) = dx; `bracket` is the initial guess
  /// interval, widened when it fails to straddle the root.
  double y0_from_moments(const MomentSet& ms, long double dx,
                         std::pair<double, double> bracket,
                         bool* bracket_valid = nullptr) const {
    if (flux_.degree() == 2) {
      const auto& c = flux_.coefficients();
      return static_cast<double>((dx - c[1] * ms.at(0)) / (2.0L * c[2] * ms.at(1)));
    }
    auto r = [&](double y) {
      return static_cast<double>(displacement(y, ms) - dx);
    };
    auto dr = [&](double y) {
      return static_cast<double>(displacement_slope(y, ms));
    };
    auto [lo, hi] = bracket;
    const double pad = 1e-12 * (1.0 + std::abs(lo) + std::abs(hi));
    lo -= pad;
    hi += pad;
    int widen = 0;
    while (r(lo) > 0.0 || r(hi) < 0.0) {
      if (bracket_valid) *bracket_valid = false;
      const double w = std::max(hi - lo, 1.0);
      if (r(lo) > 0.0) lo -= w;
      if (r(hi) < 0.0) hi += w;
      if (++widen > 200) {
        std::ostringstream msg;
        msg << "solve_h: bracket failure, residuals " << r(lo) << " at " << lo
            << " and " << r(hi) << " at " << hi;
        throw NumericalError(msg.str());
      }
    }
    double y = newton_bracketed(r, dr, lo, hi, 1e-16);
    const double tol = opts_.tol * (1.0 + std::abs(static_cast<double>(dx)));
    if (std::abs(r(y)) > tol) y = bisect_increasing(r, lo, hi, 1e-17);
    return y;
  }

  /// y0 * dx - int e^{-beta} f(y0 e^beta), i.e. the action of the curve.
  long double cost_from_moments(const MomentSet& ms, double y0,
                                long double dx) const {
    const auto& c = flux_.coefficients();
    long double sum = 0.0L, yp = 1.0L;
    for (std::size_t k = 0; k < c.size(); ++k) {
      sum += static_cast<long double>(c[k]) * yp * ms.at(static_cast<int>(k) - 1);
      yp *= y0;
    }
    return static_cast<long double>(y0) * dx - sum;
  }

  /// Same integral by adaptive quadrature; an independent route for tests.
  double displacement_quadrature(double y, double a, double b) const {
    return source_.integrate(
        [&](double s) { return flux_.fprime(y * source_.exp_beta(s)); }, a, b);
  }

  /// Two-sided estimate for y0 on [t_lo, t_hi].
  std::pair<double, double> y0_bracket(double dx, double t_lo,
                                       double t_hi) const {
    const double v = flux_.fprime_inverse(dx / (t_hi - t_lo));
    const auto [bmin, bmax] = source_.beta_range(t_lo, t_hi);
    const double a = v * std::exp(-bmax), b = v * std::exp(-bmin);
    return {std::min(a, b), std::max(a, b)};
  }

  HCurveSpec solve_h(double x_hi, double t_hi, double x_lo,
                     double t_lo) const {
    require_finite(x_hi, "solve_h");
    require_finite(x_lo, "solve_h");
    if (!(t_lo < t_hi)) {
      std::ostringstream msg;
      msg << "solve_h: need t_lo < t_hi (got " << t_lo << ", " << t_hi << ")";
      throw ConfigError(msg.str());
    }
    HCurveSpec spec;
    spec.t_lo = t_lo;
    spec.t_hi = t_hi;
    spec.x_lo = x_lo;
    spec.x_hi = x_hi;
    spec.kind = t_lo == 0.0   ? CurveKind::ToInitial
                : x_lo == 0.0 ? CurveKind::ToBoundary
                              : CurveKind::Interior;
    const long double dx = static_cast<long double>(x_hi) - x_lo;
    if (source_.is_zero() && !flux_.is_quadratic()) {
      spec.y0 = flux_.fprime_inverse(static_cast<double>(dx) / (t_hi - t_lo));
      return spec;
    }
    const auto ms = moments(t_lo, t_hi);
    const auto bracket = y0_bracket(static_cast<double>(dx), t_lo, t_hi);
    spec.y0 = y0_from_moments(ms, dx, bracket, &spec.bracket_valid);
    if (flux_.is_quadratic()) {
      const double slack =
          1e-9 * (1.0 + std::abs(bracket.first) + std::abs(bracket.second));
      spec.bracket_valid = spec.y0 >= bracket.first - slack &&
                           spec.y0 <= bracket.second + slack;
    }
    return spec;
  }

  double eval_curve(const HCurveSpec& spec, double theta) const {
    if (theta < spec.t_lo || theta > spec.t_hi) {
      std::ostringstream msg;
      msg << "eval_curve: theta = " << theta << " outside [" << spec.t_lo
          << ", " << spec.t_hi << "]";
      throw ConfigError(msg.str());
    }
    return spec.x_lo +
           static_cast<double>(displacement(spec.y0, spec.t_lo, theta));
  }

  /// Velocity f'(y0 e^{beta(theta)}).
  double speed(const HCurveSpec& spec, double theta) const {
    return flux_.fprime(spec.y0 * source_.exp_beta(theta));
  }

  /// Action int e^{-beta} f*(f'(y0 e^beta)) along the curve, evaluated as
  /// y0 * dx - int e^{-beta} f(y0 e^beta) using the dual identity.
  long double cost(const HCurveSpec& spec) const {
    return cost_of(spec.y0, spec.x_hi - spec.x_lo, spec.t_lo, spec.t_hi);
  }

  long double cost_of(double y0, double dx, double a, double b) const {
    return cost_from_moments(moments(a, b), y0, dx);
  }

  /// The action by direct quadrature of e^{-beta} f*(f'(...)).
  double cost_quadrature(const HCurveSpec& spec) const {
    return source_.integrate(
        [&](double s) {
          const double eb = source_.exp_beta(s);
          return flux_.legendre_dual(flux_.fprime(spec.y0 * eb)) / eb;
        },
        spec.t_lo, spec.t_hi);
  }

  /// Minimum of the curve over [t_lo, t_hi]. Endpoints when a speed envelope
  /// proves it; otherwise samples (at the source cache nodes when the span
  /// holds enough of them) refined by golden section.
  MinimumPoint curve_min(const HCurveSpec& spec, int n_samples = 0) const {
    if (n_samples <= 0) n_samples = opts_.samples;
    const MinimumPoint end = spec.x_lo <= spec.x_hi
                                 ? MinimumPoint{spec.t_lo, spec.x_lo}
                                 : MinimumPoint{spec.t_hi, spec.x_hi};
    if (monotone(spec) || envelope_lower(spec) >= end.value) return end;
    std::vector<double> ts, xs;
    const auto& nodes = source_.nodes();
    const auto ia = static_cast<std::size_t>(
        std::upper_bound(nodes.begin(), nodes.end(), spec.t_lo) - nodes.begin());
    const auto ib = static_cast<std::size_t>(
        std::lower_bound(nodes.begin(), nodes.end(), spec.t_hi) - nodes.begin());
    if (ib > ia && ib - ia >= static_cast<std::size_t>(n_samples)) {
      // Positions at cache nodes from the cumulative moment caches.
      ts.push_back(spec.t_lo);
      xs.push_back(spec.x_lo);
      const long double x0 =
          spec.x_lo + displacement(spec.y0, spec.t_lo, nodes[ia]);
      const auto& c = flux_.coefficients();
      const int deg = static_cast<int>(flux_.degree());
      std::vector<long double> w(static_cast<std::size_t>(deg));
      long double yp = 1.0L;
      for (int k = 1; k <= deg; ++k) {
        w[static_cast<std::size_t>(k - 1)] = k * c[static_cast<std::size_t>(k)] * yp;
        yp *= spec.y0;
      }
      for (std::size_t i = ia; i < ib; ++i) {
        long double d = 0.0L;
        const long double T = static_cast<long double>(nodes[i]) - nodes[ia];
        for (int k = 1; k <= deg; ++k) {
          const auto& cum = source_.cumulative_excess(k - 1);
          const long double ex = cum.empty() ? 0.0L : cum[i] - cum[ia];
          d += w[static_cast<std::size_t>(k - 1)] * (T + ex);
        }
        ts.push_back(nodes[i]);
        xs.push_back(static_cast<double>(x0 + d));
      }
      ts.push_back(spec.t_hi);
      xs.push_back(spec.x_hi);
    } else {
      ts = linspace(spec.t_lo, spec.t_hi, static_cast<std::size_t>(n_samples) + 1);
      // Incremental positions: one panel per step rather than from t_lo.
      xs.resize(ts.size());
      long double x = spec.x_lo;
      xs[0] = spec.x_lo;
      for (std::size_t i = 1; i < ts.size(); ++i) {
        x += displacement(spec.y0, ts[i - 1], ts[i]);
        xs[i] = static_cast<double>(x);
      }
    }
    const std::size_t best = static_cast<std::size_t>(
        std::min_element(xs.begin(), xs.end()) - xs.begin());
    MinimumPoint out{ts[best], xs[best]};
    if (best == 0 || best + 1 == ts.size()) return out;
    const double a = ts[best - 1], b = ts[best + 1];
    const double x_a = xs[best - 1];
    auto pos = [&](double th) {
      return x_a + static_cast<double>(displacement(spec.y0, a, th));
    };
    const auto g = minimize_1d(pos, a, b);
    if (g.value < out.value) out = g;
    return out;
  }

  double eps_adm(double x) const { return opts_.eps_adm * (1.0 + std::abs(x)); }

  /// Curve from (0, tau) to (x, t) stays in the quarter plane.
  bool is_admissible_boundary(double tau, double x, double t) const {
    return admissible_boundary_curve(solve_h(x, t, 0.0, tau), x);
  }

  bool admissible_boundary_curve(const HCurveSpec& spec, double x) const {
    return curve_min(spec).value >= -eps_adm(x);
  }

  /// Curve from (y, 0) to (x, t); containment (default) or the literal
  /// partial-integral condition X(theta) >= y.
  bool is_admissible_initial(double y, double x, double t) const {
    return is_admissible_initial(y, x, t, opts_.initial_mode);
  }

  bool is_admissible_initial(double y, double x, double t,
                             AdmissibilityMode mode) const {
    return admissible_initial_curve(solve_h(x, t, y, 0.0), x, mode);
  }

  bool admissible_initial_curve(const HCurveSpec& spec, double x,
                                AdmissibilityMode mode) const {
    const double floor =
        mode == AdmissibilityMode::Containment ? 0.0 : spec.x_lo;
    if (mode == AdmissibilityMode::StrictPartialIntegral &&
        spec.x_hi < spec.x_lo - eps_adm(x)) {
      return false;
    }
    return curve_min(spec).value >= floor - eps_adm(x);
  }

  /// Polyline (theta, X) with n + 1 points.
  std::vector<std::pair<double, double>> sample(const HCurveSpec& spec,
                                                int n) const {
    std::vector<std::pair<double, double>> out;
    const auto ts = linspace(spec.t_lo, spec.t_hi, static_cast<std::size_t>(n) + 1);
    long double x = spec.x_lo;
    out.emplace_back(ts[0], spec.x_lo);
    for (std::size_t i = 1; i < ts.size(); ++i) {
      x += displacement(spec.y0, ts[i - 1], ts[i]);
      out.emplace_back(ts[i], static_cast<double>(x));
    }
    return out;
  }

 private:
  /// Lower bound of the curve from its speed range: X lies above both
  /// x_lo + (theta - t_lo) s_min and x_hi - (t_hi - theta) s_max.
  double envelope_lower(const HCurveSpec& spec) const {
    const auto [bmin, bmax] = source_.beta_range(spec.t_lo, spec.t_hi);
    const double f1 = flux_.fprime(spec.y0 * std::exp(bmin));
    const double f2 = flux_.fprime(spec.y0 * std::exp(bmax));
    const double smin = std::min(f1, f2), smax = std::max(f1, f2);
    auto g = [&](double th) {
      return std::max(spec.x_lo + (th - spec.t_lo) * smin,
                      spec.x_hi - (spec.t_hi - th) * smax);
    };
    double lb = std::min(g(spec.t_lo), g(spec.t_hi));
    if (smin < smax) {
      const double th =
          spec.t_lo + (spec.x_hi - spec.x_lo - (spec.t_hi - spec.t_lo) * smax) /
                          (smin - smax);
      if (th > spec.t_lo && th < spec.t_hi) lb = std::min(lb, g(th));
    }
    return lb;
  }

  /// True when f'(y0 e^beta) keeps one sign on the whole interval.
  bool monotone(const HCurveSpec& spec) const {
    const auto [bmin, bmax] = source_.beta_range(spec.t_lo, spec.t_hi);
    const double lam = flux_.lambda_f();
    if (bmin == bmax) return true;
    const double u1 = spec.y0 * std::exp(bmin), u2 = spec.y0 * std::exp(bmax);
    return (std::min(u1, u2) > lam) || (std::max(u1, u2) < lam);
  }

  const FluxModel& flux_;
  const SourceModel& source_;
  HCurveOptions opts_;
};

}  // namespace laxol
