#pragma once

/// \file
/// One-dimensional numerical kernels shared by every module: adaptive
/// quadrature, fixed Gauss-Legendre panels, bracketed root finding and
/// golden-section minimization.

#include <algorithm>
#include <cmath>
#include <functional>
#include <cstdint>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>

namespace laxol {

/// Raised when a numerical procedure cannot reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for malformed models, configs or out-of-contract arguments.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw ConfigError(std::string(what) + ": non-finite input");
  }
}

namespace detail {

struct SimpsonPanel {
  double a, b, fa, fm, fb, whole;
};

template <typename F>
double simpson_recurse(const F& fn, const SimpsonPanel& p, double tol,
                       int depth, int max_depth, double& err_acc,
                       double& worst_err, double& worst_a, double& worst_b,
                       bool& converged) {
  const double m = 0.5 * (p.a + p.b);
  const double lm = 0.5 * (p.a + m);
  const double rm = 0.5 * (m + p.b);
  const double flm = fn(lm);
  const double frm = fn(rm);
  const double left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
  const double right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
  const double delta = left + right - p.whole;
  if (std::abs(delta) <= 15.0 * tol || depth >= max_depth) {
    if (depth >= max_depth && std::abs(delta) > 15.0 * tol) {
      converged = false;
      if (std::abs(delta) > worst_err) {
        worst_err = std::abs(delta);
        worst_a = p.a;
        worst_b = p.b;
      }
    }
    err_acc += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  return simpson_recurse(fn, {p.a, m, p.fa, flm, p.fm, left}, 0.5 * tol,
                         depth + 1, max_depth, err_acc, worst_err, worst_a,
                         worst_b, converged) +
         simpson_recurse(fn, {m, p.b, p.fm, frm, p.fb, right}, 0.5 * tol,
                         depth + 1, max_depth, err_acc, worst_err, worst_a,
                         worst_b, converged);
}

}  // namespace detail

struct IntegrationResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = true;
  double worst_a = 0.0;
  double worst_b = 0.0;
};

/// Adaptive Simpson on [a, b] with estimated error <= tol * (1 + |result|).
/// The tolerance is distributed over `breakpoints` that fall inside (a, b);
/// every panel is split at them so kinks of piecewise data never straddle a
/// Simpson cell.
template <typename F>
IntegrationResult adaptive_simpson(const F& fn, double a, double b, double tol,
                                   std::span<const double> breakpoints = {},
                                   int max_depth = 48) {
  IntegrationResult out;
  if (!(a <= b)) {
    throw ConfigError("integrate: requires a <= b");
  }
  if (a == b) return out;
  std::vector<double> cuts{a};
  for (double c : breakpoints) {
    if (c > a && c < b) cuts.push_back(c);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());

  // A cheap first pass sizes the absolute tolerance.
  double scale = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    scale += (hi - lo) / 6.0 *
             (fn(lo) + 4.0 * fn(0.5 * (lo + hi)) + fn(hi));
  }
  const double abs_tol = tol * (1.0 + std::abs(scale));
  const double width = b - a;

  double worst_err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    if (hi <= lo) continue;
    // Evaluate slightly inside one-sided limits at interior breakpoints.
    const double eps = 1e-14 * std::max(1.0, std::abs(hi));
    const double flo = fn(i == 0 ? lo : std::min(lo + eps, hi));
    const double fhi =
        fn(i + 2 == cuts.size() ? hi : std::max(hi - eps, lo));
    const double fm = fn(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
    const double panel_tol = abs_tol * (hi - lo) / width;
    out.value += detail::simpson_recurse(
        fn, {lo, hi, flo, fm, fhi, whole}, panel_tol, 0, max_depth,
        out.error_estimate, worst_err, out.worst_a, out.worst_b,
        out.converged);
  }
  return out;
}

/// Shared quadrature entry point. Throws when the subdivision cap is hit,
/// reporting the worst panel.
template <typename F>
double integrate(const F& fn, double a, double b, double tol,
                 std::span<const double> breakpoints = {}) {
  const auto r = adaptive_simpson(fn, a, b, tol, breakpoints);
  if (!r.converged &&
      r.error_estimate > 100.0 * tol * (1.0 + std::abs(r.value))) {
    std::ostringstream msg;
    msg << "integrate: subdivision cap reached; worst panel [" << r.worst_a
        << ", " << r.worst_b << "], error estimate " << r.error_estimate;
    throw NumericalError(msg.str());
  }
  return r.value;
}

/// 15-point Gauss-Legendre rule on one panel. Used where the integrand is
/// smooth on the panel and near machine precision is wanted.
template <typename F>
double gauss_panel(const F& fn, double a, double b) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss<double, 15>::integrate(fn, a, b);
}

struct MinimumPoint {
  double x = 0.0;
  double value = kInf;
};

/// Golden-section search on [a, b]. Non-finite values are treated as +inf,
/// so the search retreats toward the feasible side of a domain edge.
template <typename F>
MinimumPoint golden_section(const F& fn, double a, double b, double x_tol,
                            int max_iter = 200) {
  constexpr double inv_phi = 0.6180339887498949;
  auto eval = [&](double x) {
    const double v = fn(x);
    return std::isnan(v) ? kInf : v;
  };
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = eval(c), fd = eval(d);
  MinimumPoint best{a, eval(a)};
  if (const double fb = eval(b); fb < best.value) best = {b, fb};
  for (int it = 0; it < max_iter && (b - a) > x_tol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval(d);
    }
  }
  if (fc < best.value) best = {c, fc};
  if (fd < best.value) best = {d, fd};
  return best;
}

/// Brent's method (Boost) on [a, b] to about sqrt(eps) of the bracket
/// width, which is all a smooth minimum can resolve. Brent runs on [0, 1]
/// since its tolerance has an absolute floor near 2^-27. Falls back to
/// golden section when the objective is non-finite anywhere Brent looks.
template <typename F>
MinimumPoint minimize_1d(const F& fn, double a, double b) {
  struct NonFinite {};
  const double w = b - a;
  auto guarded = [&](double s) {
    const double v = fn(s < 1.0 ? a + s * w : b);
    if (!std::isfinite(v)) throw NonFinite{};
    return v;
  };
  try {
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::brent_find_minima(
        guarded, 0.0, 1.0, std::numeric_limits<double>::digits / 2, iters);
    MinimumPoint out{r.first < 1.0 ? a + r.first * w : b, r.second};
    for (double e : {a, b}) {
      if (const double v = fn(e); std::isfinite(v) && v < out.value) out = {e, v};
    }
    return out;
  } catch (const NonFinite&) {
    return golden_section(fn, a, b, 1e-9 * (b - a) + 1e-300);
  }
}

/// Root of a nondecreasing function on [lo, hi] by bisection. The caller
/// guarantees fn(lo) <= 0 <= fn(hi).
template <typename F>
double bisect_increasing(const F& fn, double lo, double hi, double x_tol,
                         int max_iter = 400) {
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(hi - lo > x_tol * (1.0 + std::abs(mid))) || mid == lo ||
        mid == hi) {
      return mid;
    }
    if (fn(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Safeguarded Newton for a strictly increasing function with a known
/// derivative; falls back to bisection whenever a step leaves the bracket.
template <typename F, typename DF>
double newton_bracketed(const F& fn, const DF& dfn, double lo, double hi,
                        double x_tol, int max_iter = 200) {
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < max_iter; ++it) {
    const double fx = fn(x);
    if (fx == 0.0) return x;
    if (fx < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double d = dfn(x);
    double next = (d > 0.0 && std::isfinite(d)) ? x - fx / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - x);
    x = next;
    if (step <= x_tol * (1.0 + std::abs(x)) || hi - lo <= x_tol * (1.0 + std::abs(x))) {
      return x;
    }
  }
  return x;
}

/// Uniformly spaced points including both ends.
inline std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = a;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  out.back() = b;
  return out;
}

}  // namespace laxol
