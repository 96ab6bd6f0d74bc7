#pragma once

/// \file
/// Source coefficient alpha(t), its antiderivative beta(t) and the exponential
/// moments of beta that every h-curve integral reduces to.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "laxol/numerics.hpp"
#include "laxol/piecewise.hpp"

namespace laxol {

struct SourceOptions {
  double t_max = 1.0;
  double tol_quad = 1e-9;
  /// Uniform cache step is t_max / beta_cells.
  int beta_cells = 4096;
  /// Moments int e^{m beta} are cached for m in [-1, max_moment].
  int max_moment = 3;
};

/// alpha(t) with beta(t) = int_0^t alpha. Immutable after construction; all
/// caches are built to t_max in the constructor.
class SourceModel {
 public:
  using Fn = std::function<double(double)>;

  static SourceModel zero(SourceOptions opts = {}) {
    SourceModel s(
        "zero", [](double) { return 0.0; }, [](double) { return 0.0; }, {},
        opts);
    return s;
  }

  static SourceModel constant(double a, SourceOptions opts = {}) {
    require_finite(a, "constant alpha");
    if (a == 0.0) return zero(opts);
    SourceModel s(
        "constant", [a](double) { return a; },
        [a](double t) { return a * t; }, {}, opts);
    s.constant_rate_ = a;
    return s;
  }

  /// Piecewise polynomial alpha; beta is its exact antiderivative.
  static SourceModel piecewise(PiecewisePolynomial p, SourceOptions opts = {}) {
    if (p.breaks().front() != 0.0) {
      throw ConfigError("piecewise alpha: first break must be 0");
    }
    auto shared = std::make_shared<PiecewisePolynomial>(std::move(p));
    std::vector<double> brk(shared->breaks().begin() + 1,
                            shared->breaks().end());
    return SourceModel(
        "piecewise_poly", [shared](double t) { return (*shared)(t); },
        [shared](double t) { return shared->antiderivative(t); },
        std::move(brk), opts);
  }

  /// Sampled table with linear interpolation, constant past the last sample.
  static SourceModel table(const std::vector<double>& ts,
                           const std::vector<double>& values,
                           SourceOptions opts = {}) {
    if (ts.size() != values.size() || ts.empty() || ts.front() != 0.0) {
      throw ConfigError(
          "alpha table: need matching t/value arrays starting at t = 0");
    }
    std::vector<std::vector<double>> coeffs;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (i + 1 < ts.size()) {
        const double slope = (values[i + 1] - values[i]) / (ts[i + 1] - ts[i]);
        coeffs.push_back({values[i], slope});
      } else {
        coeffs.push_back({values[i]});
      }
    }
    auto s = piecewise(PiecewisePolynomial(ts, std::move(coeffs)), opts);
    s.name_ = "table";
    return s;
  }

  /// Generic alpha without a closed-form antiderivative: beta comes from the
  /// node cache plus one local quadrature.
  static SourceModel from_function(Fn alpha, std::vector<double> breakpoints,
                                   SourceOptions opts = {}) {
    return SourceModel("function", std::move(alpha), nullptr,
                       std::move(breakpoints), opts);
  }

  /// alpha = P'(t)/P(t) with P(t) = 4t^3 - 30t^2 + 70t + 10, so that
  /// beta = ln(P(t)/10).
  static SourceModel example_1_1(SourceOptions opts = {}) {
    auto P = [](double t) { return ((4.0 * t - 30.0) * t + 70.0) * t + 10.0; };
    return SourceModel(
        "example-1-1",
        [P](double t) { return ((12.0 * t - 60.0) * t + 70.0) / P(t); },
        [P](double t) { return std::log(P(t) / 10.0); }, {}, opts);
  }

  /// gamma(t) = (t sin(1/t))^4 and alpha = gamma'' / (60 + gamma') on
  /// (1/((2N+1) pi), 1/pi), zero elsewhere. Then e^beta = 1 + gamma'/60.
  static SourceModel example_1_2(int n_cut, SourceOptions opts = {}) {
    if (n_cut < 1) throw ConfigError("example-1-2: N must be >= 1");
    const double pi = std::numbers::pi;
    const double t_cut = 1.0 / ((2.0 * n_cut + 1.0) * pi);
    const double t_end = 1.0 / pi;
    auto active = [=](double t) { return t > t_cut && t < t_end; };
    auto alpha = [=](double t) {
      if (!active(t)) return 0.0;
      const auto d = example_1_2_gamma(t);
      return d.g2 / (60.0 + d.g1);
    };
    auto beta = [=](double t) {
      if (!active(t)) return 0.0;
      return std::log1p(example_1_2_gamma(t).g1 / 60.0);
    };
    SourceModel s("example-1-2", alpha, beta, {t_cut, t_end}, opts);
    return s;
  }

  struct GammaDerivs {
    double g0, g1, g2;
  };

  /// gamma = g^4 with g = t sin(1/t), and its first two derivatives.
  static GammaDerivs example_1_2_gamma(double t) {
    const double s = std::sin(1.0 / t), c = std::cos(1.0 / t);
    const double g = t * s;
    const double gp = s - c / t;
    const double gpp = -s / (t * t * t);
    return {g * g * g * g, 4.0 * g * g * g * gp,
            12.0 * g * g * gp * gp + 4.0 * g * g * g * gpp};
  }

  const std::string& name() const { return name_; }
  double t_max() const { return opts_.t_max; }
  double tol_quad() const { return opts_.tol_quad; }
  int max_moment() const { return opts_.max_moment; }
  double alpha_inf_norm() const { return alpha_inf_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& nodes() const { return nodes_; }
  bool is_zero() const { return name_ == "zero"; }
  bool has_exact_beta() const { return static_cast<bool>(beta_exact_); }

  double alpha(double t) const {
    check_time(t, "alpha");
    return alpha_(t);
  }

  double beta(double t) const {
    check_time(t, "beta");
    if (beta_exact_) return beta_exact_(t);
    const std::size_t k = cell_of(t);
    return static_cast<double>(beta_nodes_[k]) +
           gauss_panel(alpha_, nodes_[k], t);
  }

  double exp_beta(double t) const { return std::exp(beta(t)); }

  /// Shared quadrature entry point with this model's tolerance and breaks.
  template <typename F>
  double integrate(const F& fn, double a, double b) const {
    return laxol::integrate(fn, a, b, opts_.tol_quad, breakpoints_);
  }

  /// int_a^b e^{m beta(theta)} d theta.
  long double moment(int m, double a, double b) const {
    return static_cast<long double>(b) - static_cast<long double>(a) +
           moment_excess(m, a, b);
  }

  /// int_a^b (e^{m beta} - 1); small when beta is, and free of the
  /// cancellation that plagues moment(m) - (b - a).
  long double moment_excess(int m, double a, double b) const {
    if (m < -1 || m > opts_.max_moment) {
      std::ostringstream msg;
      msg << "moment order " << m << " outside cached range [-1, "
          << opts_.max_moment << "]";
      throw ConfigError(msg.str());
    }
    check_time(a, "moment");
    check_time(b, "moment");
    if (m == 0 || a == b || is_zero()) return 0.0L;
    if (b < a) return -moment_excess(m, b, a);
    if (constant_rate_) {
      // int (e^{r s} - 1) ds with r = m * alpha, in closed form.
      const long double r = static_cast<long double>(m) * *constant_rate_;
      return (std::expm1(r * b) - std::expm1(r * a)) / r -
             (static_cast<long double>(b) - a);
    }
    const std::size_t ka = cell_of(a), kb = cell_of(b);
    const auto& cum = excess_[static_cast<std::size_t>(m + 1)];
    if (ka == kb) return excess_panel(m, a, b);
    return (cum[kb] - cum[ka + 1]) + excess_panel(m, a, nodes_[ka + 1]) +
           excess_panel(m, nodes_[kb], b);
  }

  /// int_0^{nodes()[k]} (e^{m beta} - 1) at every cache node; empty when
  /// beta vanishes identically.
  const std::vector<long double>& cumulative_excess(int m) const {
    if (m < -1 || m > opts_.max_moment) {
      throw ConfigError("cumulative_excess: order outside the cached range");
    }
    return excess_[static_cast<std::size_t>(m + 1)];
  }

  /// Lower/upper bounds of beta on [a, b], from per-cell sampled extremes
  /// padded by the cell's sampled max |alpha| times h / 16.
  std::pair<double, double> beta_range(double a, double b) const {
    if (is_zero()) return {0.0, 0.0};
    if (b < a) std::swap(a, b);
    check_time(a, "beta_range");
    check_time(b, "beta_range");
    std::size_t ka = cell_of(a), kb = cell_of(b);
    if (kb > ka && b == nodes_[kb]) --kb;
    double lo = std::min(beta(a), beta(b));
    double hi = std::max(beta(a), beta(b));
    // Sparse table for long spans, plain loop otherwise.
    auto [clo, chi] = range_query(ka, kb);
    lo = std::min(lo, clo);
    hi = std::max(hi, chi);
    return {lo, hi};
  }

 private:
  SourceModel(std::string name, Fn alpha, Fn beta_exact,
              std::vector<double> breakpoints, SourceOptions opts)
      : name_(std::move(name)),
        alpha_(std::move(alpha)),
        beta_exact_(std::move(beta_exact)),
        opts_(opts) {
    if (!(opts_.t_max > 0.0) || !std::isfinite(opts_.t_max)) {
      throw ConfigError("source: t_max must be positive");
    }
    if (!(opts_.tol_quad > 0.0)) {
      throw ConfigError("source: tol_quad must be positive");
    }
    if (opts_.beta_cells < 1 || opts_.max_moment < 1) {
      throw ConfigError("source: beta_cells and max_moment must be >= 1");
    }
    for (double b : breakpoints) {
      if (b > 0.0 && b < opts_.t_max) breakpoints_.push_back(b);
    }
    std::sort(breakpoints_.begin(), breakpoints_.end());
    build_cache();
  }

  void check_time(double t, const char* what) const {
    if (!(t >= 0.0) || t > opts_.t_max * (1.0 + 1e-12) + 1e-300) {
      std::ostringstream msg;
      msg << what << ": t = " << t << " outside [0, " << opts_.t_max << "]";
      throw ConfigError(msg.str());
    }
  }

  std::size_t cell_of(double t) const {
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
    std::size_t k = (it == nodes_.begin())
                        ? 0
                        : static_cast<std::size_t>(it - nodes_.begin()) - 1;
    return std::min(k, nodes_.size() - 2);
  }

  long double excess_panel(int m, double a, double b) const {
    if (a == b) return 0.0L;
    auto fn = [&](long double s) {
      return std::expm1(static_cast<long double>(m) *
                        static_cast<long double>(beta(static_cast<double>(s))));
    };
    return boost::math::quadrature::gauss<long double, 15>::integrate(
        fn, static_cast<long double>(a), static_cast<long double>(b));
  }

  void build_cache() {
    const double tm = opts_.t_max;
    nodes_ = linspace(0.0, tm, static_cast<std::size_t>(opts_.beta_cells) + 1);
    for (double b : breakpoints_) nodes_.push_back(b);
    std::sort(nodes_.begin(), nodes_.end());
    nodes_.erase(std::unique(nodes_.begin(), nodes_.end(),
                             [tm](double x, double y) {
                               return std::abs(x - y) <= 1e-14 * tm;
                             }),
                 nodes_.end());
    const std::size_t n = nodes_.size();
    const std::size_t cells = n - 1;

    using GL = boost::math::quadrature::gauss<double, 15>;
    const auto& abs = GL::abscissa();

    // beta at nodes (generic path), alpha norm and per-cell extremes.
    beta_nodes_.assign(n, 0.0L);
    cell_lo_.assign(cells, 0.0);
    cell_hi_.assign(cells, 0.0);
    alpha_inf_ = 0.0;
    std::vector<double> samples;
    for (std::size_t k = 0; k < cells; ++k) {
      const double a = nodes_[k], b = nodes_[k + 1];
      if (!beta_exact_) {
        beta_nodes_[k + 1] =
            beta_nodes_[k] + static_cast<long double>(gauss_panel(alpha_, a, b));
      }
      samples.clear();
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      for (std::size_t i = 0; i < abs.size(); ++i) {
        samples.push_back(mid + half * abs[i]);
        if (abs[i] != 0.0) samples.push_back(mid - half * abs[i]);
      }
      samples.push_back(a + 1e-12 * (b - a));
      samples.push_back(b - 1e-12 * (b - a));
      for (double s : samples) {
        const double al = alpha_(s);
        if (!std::isfinite(al)) {
          std::ostringstream msg;
          msg << "source: alpha(" << s << ") is not finite";
          throw ConfigError(msg.str());
        }
        alpha_inf_ = std::max(alpha_inf_, std::abs(al));
      }
    }
    for (std::size_t k = 0; k < cells; ++k) {
      const double a = nodes_[k], b = nodes_[k + 1];
      double lo = std::min(beta(a), beta(b));
      double hi = std::max(beta(a), beta(b));
      double amax = 0.0;
      for (int i = 0; i <= 16; ++i) {
        const double s = a + (b - a) * i / 16.0;
        amax = std::max(amax, std::abs(alpha_(s)));
        if (i > 0 && i < 16) {
          const double v = beta(s);
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
      const double pad = amax * (b - a) / 16.0;
      cell_lo_[k] = lo - pad;
      cell_hi_[k] = hi + pad;
    }
    build_sparse();

    excess_.assign(static_cast<std::size_t>(opts_.max_moment + 2), {});
    if (is_zero()) return;
    for (int m = -1; m <= opts_.max_moment; ++m) {
      auto& cum = excess_[static_cast<std::size_t>(m + 1)];
      cum.assign(n, 0.0L);
      if (m == 0) continue;
      for (std::size_t k = 0; k < cells; ++k) {
        cum[k + 1] = cum[k] + excess_panel(m, nodes_[k], nodes_[k + 1]);
      }
    }
  }

  void build_sparse() {
    const std::size_t cells = cell_lo_.size();
    sparse_lo_.assign(1, cell_lo_);
    sparse_hi_.assign(1, cell_hi_);
    for (std::size_t w = 1; 2 * w <= cells; w *= 2) {
      const auto& plo = sparse_lo_.back();
      const auto& phi = sparse_hi_.back();
      std::vector<double> lo(cells - 2 * w + 1), hi(cells - 2 * w + 1);
      for (std::size_t i = 0; i < lo.size(); ++i) {
        lo[i] = std::min(plo[i], plo[i + w]);
        hi[i] = std::max(phi[i], phi[i + w]);
      }
      sparse_lo_.push_back(std::move(lo));
      sparse_hi_.push_back(std::move(hi));
    }
  }

  std::pair<double, double> range_query(std::size_t ka, std::size_t kb) const {
    const std::size_t len = kb - ka + 1;
    std::size_t level = 0;
    while ((std::size_t{2} << level) <= len) ++level;
    const std::size_t w = std::size_t{1} << level;
    return {std::min(sparse_lo_[level][ka], sparse_lo_[level][kb + 1 - w]),
            std::max(sparse_hi_[level][ka], sparse_hi_[level][kb + 1 - w])};
  }

  std::string name_;
  Fn alpha_;
  Fn beta_exact_;
  SourceOptions opts_;
  std::vector<double> breakpoints_;
  std::vector<double> nodes_;
  std::vector<long double> beta_nodes_;
  std::vector<double> cell_lo_, cell_hi_;
  std::vector<std::vector<double>> sparse_lo_, sparse_hi_;
  std::vector<std::vector<long double>> excess_;
  double alpha_inf_ = 0.0;
  std::optional<double> constant_rate_;
};

}  // namespace laxol
