#pragma once

/// \file
/// Strictly convex, superlinear flux models and their derived objects.

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "laxol/numerics.hpp"

namespace laxol {

enum class FluxFamily { ShiftedQuadratic, Polynomial };

struct FluxOptions {
  double tol_root = 1e-10;
  /// Half-width of the sample window used to validate convexity.
  double window = 64.0;
  int convexity_samples = 2001;
  /// Superlinearity proxy: f(u)/|u| at the window edges must exceed this.
  double superlinear_threshold = 10.0;
};

/// Convex flux f(u) = sum_k coeffs[k] u^k. Immutable after construction;
/// lambda_f and the validated window are filled in the constructor.
class FluxModel {
 public:
  /// f(u) = a (u - c)^2 / 2.
  static FluxModel shifted_quadratic(double a, double c,
                                     FluxOptions opts = {}) {
    if (!(a > 0.0) || !std::isfinite(a) || !std::isfinite(c)) {
      throw ConfigError("shifted_quadratic flux: need a > 0 and finite c");
    }
    FluxModel m({0.5 * a * c * c, -a * c, 0.5 * a}, opts);
    m.family_ = FluxFamily::ShiftedQuadratic;
    m.quad_a_ = a;
    m.quad_c_ = c;
    m.lambda_f_ = c;
    return m;
  }

  static FluxModel burgers(FluxOptions opts = {}) {
    return shifted_quadratic(1.0, 0.0, opts);
  }

  /// General convex polynomial; convexity is checked on a sample window.
  static FluxModel polynomial(std::vector<double> coeffs,
                              FluxOptions opts = {}) {
    while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
    if (coeffs.size() == 3) {
      // a(u-c)^2/2 + const: keep the closed forms, then restore the constant.
      const double a = 2.0 * coeffs[2];
      if (a > 0.0) {
        const double c = -coeffs[1] / a;
        FluxModel m({coeffs[0], coeffs[1], coeffs[2]}, opts);
        m.family_ = FluxFamily::ShiftedQuadratic;
        m.quad_a_ = a;
        m.quad_c_ = c;
        m.lambda_f_ = c;
        return m;
      }
    }
    FluxModel m(std::move(coeffs), opts);
    m.lambda_f_ = m.fprime_inverse(0.0);
    return m;
  }

  FluxFamily family() const { return family_; }
  bool is_quadratic() const { return family_ == FluxFamily::ShiftedQuadratic; }
  double quadratic_a() const { return quad_a_; }
  double quadratic_c() const { return quad_c_; }
  const std::vector<double>& coefficients() const { return coeffs_; }
  std::size_t degree() const { return coeffs_.size() - 1; }
  double tol_root() const { return opts_.tol_root; }
  double window_lo() const { return u_lo_; }
  double window_hi() const { return u_hi_; }

  double f(double u) const {
    require_finite(u, "flux f");
    double acc = 0.0;
    for (std::size_t k = coeffs_.size(); k-- > 0;) acc = acc * u + coeffs_[k];
    return acc;
  }

  double fprime(double u) const {
    double acc = 0.0;
    for (std::size_t k = coeffs_.size(); k-- > 1;) {
      acc = acc * u + static_cast<double>(k) * coeffs_[k];
    }
    return acc;
  }

  double fsecond(double u) const {
    double acc = 0.0;
    for (std::size_t k = coeffs_.size(); k-- > 2;) {
      acc = acc * u + static_cast<double>(k * (k - 1)) * coeffs_[k];
    }
    return acc;
  }

  /// The sonic point where f' changes sign.
  double lambda_f() const { return lambda_f_; }

  /// u with f'(u) = s, by expanding-bracket safeguarded Newton.
  double fprime_inverse(double s) const {
    require_finite(s, "fprime_inverse");
    if (is_quadratic()) return quad_c_ + s / quad_a_;
    double lo = -1.0, hi = 1.0;
    constexpr double cap = 1152921504606846976.0;  // 2^60
    while (fprime(lo) > s) {
      lo *= 2.0;
      if (-lo > cap) throw bracket_failure(s, lo, hi);
    }
    while (fprime(hi) < s) {
      hi *= 2.0;
      if (hi > cap) throw bracket_failure(s, lo, hi);
    }
    auto g = [&](double u) { return fprime(u) - s; };
    auto dg = [&](double u) { return fsecond(u); };
    double u = newton_bracketed(g, dg, lo, hi, 1e-16);
    // Polish to the residual tolerance if Newton stalled on a flat spot.
    if (std::abs(g(u)) > opts_.tol_root * (1.0 + std::abs(s))) {
      u = bisect_increasing(g, lo, hi, 1e-17);
    }
    return u;
  }

  /// Convex dual f*(p) = max_v [p v - f(v)], evaluated at v = (f')^{-1}(p).
  double legendre_dual(double p) const {
    require_finite(p, "legendre_dual");
    if (is_quadratic()) {
      // f(c) is the additive constant of the quadratic (zero for presets).
      return p * p / (2.0 * quad_a_) + quad_c_ * p - f(quad_c_);
    }
    const double v = fprime_inverse(p);
    return p * v - f(v);
  }

  /// f*(f'(p)) = p f'(p) - f(p); avoids the inversion entirely.
  double dual_of_slope(double p) const { return p * fprime(p) - f(p); }

 private:
  FluxModel(std::vector<double> coeffs, FluxOptions opts)
      : coeffs_(std::move(coeffs)), opts_(opts) {
    for (double c : coeffs_) require_finite(c, "flux coefficient");
    const std::size_t d = coeffs_.size() - 1;
    if (d < 2 || d % 2 != 0 || !(coeffs_.back() > 0.0)) {
      throw ConfigError(
          "flux: need an even-degree polynomial (>= 2) with positive leading "
          "coefficient");
    }
    validate();
  }

  void validate() {
    // Expand the window until the superlinearity proxy holds.
    double w = opts_.window;
    for (int i = 0; i < 60; ++i) {
      if (f(w) / w > opts_.superlinear_threshold &&
          f(-w) / w > opts_.superlinear_threshold) {
        break;
      }
      w *= 2.0;
    }
    u_lo_ = -w;
    u_hi_ = w;
    const int n = std::max(opts_.convexity_samples, 3);
    double prev = fprime(u_lo_);
    for (int i = 1; i < n; ++i) {
      const double u = u_lo_ + (u_hi_ - u_lo_) * i / (n - 1);
      const double cur = fprime(u);
      if (!(cur > prev)) {
        std::ostringstream msg;
        msg << "flux: f' not strictly increasing near u = " << u;
        throw ConfigError(msg.str());
      }
      prev = cur;
    }
    for (int i = 0; i + 2 < n; i += 7) {
      const double u1 = u_lo_ + (u_hi_ - u_lo_) * i / (n - 1);
      const double u2 = u_lo_ + (u_hi_ - u_lo_) * (i + 2) / (n - 1);
      const double mid = f(0.5 * (u1 + u2));
      const double chord = 0.5 * (f(u1) + f(u2));
      if (!(mid < chord + 1e-14 * std::abs(chord))) {
        std::ostringstream msg;
        msg << "flux: midpoint convexity fails on [" << u1 << ", " << u2
            << "]";
        throw ConfigError(msg.str());
      }
    }
  }

  NumericalError bracket_failure(double s, double lo, double hi) const {
    std::ostringstream msg;
    msg << "fprime_inverse(" << s << "): bracket expansion exceeded 2^60 (f'("
        << lo << ") = " << fprime(lo) << ", f'(" << hi << ") = " << fprime(hi)
        << ")";
    return NumericalError(msg.str());
  }

  std::vector<double> coeffs_;
  FluxOptions opts_;
  FluxFamily family_ = FluxFamily::Polynomial;
  double quad_a_ = 0.0;
  double quad_c_ = 0.0;
  double lambda_f_ = 0.0;
  double u_lo_ = -1.0;
  double u_hi_ = 1.0;
};

}  // namespace laxol
