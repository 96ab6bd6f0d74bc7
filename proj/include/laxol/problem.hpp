#pragma once

/// \file
/// The initial-boundary value problem: flux, source, data and tolerances.

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "laxol/flux.hpp"
#include "laxol/hcurve.hpp"
#include "laxol/numerics.hpp"
#include "laxol/piecewise.hpp"
#include "laxol/source.hpp"

namespace laxol {

struct Tolerances {
  double tol_quad = 1e-9;
  double tol_root = 1e-10;
  /// Minimizer-set band is val_tol * (1 + |W|).
  double val_tol = 1e-7;
  double eps_adm = 1e-8;
  double tol_bln = 1e-4;
  /// Minimizers differ when |hi - lo| > arg_tol * (1 + |x|).
  double arg_tol = 1e-5;
  double entropy_tol = 1e-4;
  /// Uniform scan cells for the 1-D global minimizations.
  int scan_cells = 2048;
  AdmissibilityMode initial_mode = AdmissibilityMode::Containment;
};

/// Immutable problem description. Copies share the underlying models.
class Problem {
 public:
  Problem(std::string name, FluxModel flux, SourceModel source,
          PiecewisePolynomial u0, PiecewisePolynomial ub, double x_max,
          Tolerances tol = {})
      : name_(std::move(name)),
        flux_(std::make_shared<const FluxModel>(std::move(flux))),
        source_(std::make_shared<const SourceModel>(std::move(source))),
        u0_(std::move(u0)),
        ub_(std::move(ub)),
        x_max_(x_max),
        tol_(tol) {
    if (!(x_max_ > 0.0)) throw ConfigError("problem: x_max must be positive");
    if (u0_.breaks().front() != 0.0 || ub_.breaks().front() != 0.0) {
      throw ConfigError("problem: u0 and ub must start at 0");
    }
    if (!(tol_.val_tol > 0.0 && tol_.eps_adm > 0.0 && tol_.tol_bln > 0.0 &&
          tol_.arg_tol > 0.0 && tol_.entropy_tol > 0.0 &&
          tol_.scan_cells >= 8)) {
      throw ConfigError("problem: tolerances must be positive");
    }
    HCurveOptions hopts;
    hopts.eps_adm = tol_.eps_adm;
    hopts.initial_mode = tol_.initial_mode;
    curves_ = std::make_shared<const HCurves>(*flux_, *source_, hopts);
    const double lam = flux_->lambda_f();
    u0_norm_ = u0_.sup_abs(std::max(x_max_, u0_.breaks().back()) + 1.0);
    double ub_norm = 0.0;
    for (double t : linspace(0.0, t_max(), 2049)) {
      ub_norm = std::max(ub_norm, std::abs(ub_bar(t)));
    }
    for (double b : ub_.breaks()) {
      if (b <= t_max()) ub_norm = std::max(ub_norm, std::abs(ub_bar(b)));
    }
    ub_bar_norm_ = std::max(ub_norm, std::abs(lam));
    for (double b : ub_.breaks()) {
      if (b > 0.0 && b < t_max()) time_breaks_.push_back(b);
    }
    for (double b : source_->breakpoints()) time_breaks_.push_back(b);
    std::sort(time_breaks_.begin(), time_breaks_.end());
  }

  const std::string& name() const { return name_; }
  const FluxModel& flux() const { return *flux_; }
  const SourceModel& source() const { return *source_; }
  const HCurves& curves() const { return *curves_; }
  const PiecewisePolynomial& u0() const { return u0_; }
  const PiecewisePolynomial& ub() const { return ub_; }
  const Tolerances& tol() const { return tol_; }
  double t_max() const { return source_->t_max(); }
  double x_max() const { return x_max_; }
  /// Breakpoints of u_b and alpha inside (0, t_max).
  const std::vector<double>& time_breaks() const { return time_breaks_; }

  double u0_at(double x) const { return u0_(x); }
  /// U0(y) = int_0^y u0, exact.
  double U0(double y) const { return u0_.antiderivative(y); }
  double ub_at(double t) const { return ub_(t); }
  double ub_bar(double t) const {
    return std::max(ub_(t), flux_->lambda_f());
  }
  double u0_norm() const { return u0_norm_; }
  double ub_bar_norm() const { return ub_bar_norm_; }

  /// Bound on characteristic speeds for curves carrying values of
  /// magnitude up to `u`, amplified or damped by e^{+-|beta|}.
  double speed_bound(double u) const {
    const auto [bmin, bmax] = source_->beta_range(0.0, t_max());
    const double amp = std::exp(std::max(std::abs(bmin), std::abs(bmax)));
    const double lam = std::abs(flux_->lambda_f());
    double s = 0.0;
    for (double v : {u * amp, -u * amp, lam * amp, -lam * amp}) {
      s = std::max(s, std::abs(flux_->fprime(v)));
    }
    return s;
  }

  /// Three-piece hypothesis f(lambda_f e^beta) <= f(ub_bar) on samples.
  bool three_piece_hypothesis(int samples = 1024) const {
    const double lam = flux_->lambda_f();
    for (double t : linspace(0.0, t_max(), static_cast<std::size_t>(samples))) {
      const double lhs = flux_->f(lam * source_->exp_beta(t));
      if (lhs > flux_->f(ub_bar(t)) + 1e-12 * (1.0 + std::abs(lhs))) {
        return false;
      }
    }
    return true;
  }

 private:
  std::string name_;
  std::shared_ptr<const FluxModel> flux_;
  std::shared_ptr<const SourceModel> source_;
  std::shared_ptr<const HCurves> curves_;
  PiecewisePolynomial u0_;
  PiecewisePolynomial ub_;
  double x_max_;
  Tolerances tol_;
  double u0_norm_ = 0.0;
  double ub_bar_norm_ = 0.0;
  std::vector<double> time_breaks_;
};

}  // namespace laxol
