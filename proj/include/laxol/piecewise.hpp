#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "laxol/numerics.hpp"

namespace laxol {

/// Piecewise polynomial on [breaks[0], inf). Segment i covers
/// [breaks[i], breaks[i+1]) and is stored in the local variable s - breaks[i];
/// the last segment extends to infinity. Integration is exact.
class PiecewisePolynomial {
 public:
  PiecewisePolynomial() : PiecewisePolynomial({0.0}, {{0.0}}) {}

  PiecewisePolynomial(std::vector<double> breaks,
                      std::vector<std::vector<double>> coeffs)
      : breaks_(std::move(breaks)), coeffs_(std::move(coeffs)) {
    if (breaks_.empty() || breaks_.size() != coeffs_.size()) {
      throw ConfigError(
          "piecewise polynomial: need one coefficient list per break");
    }
    for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
      if (!(breaks_[i] < breaks_[i + 1])) {
        throw ConfigError("piecewise polynomial: breaks must increase");
      }
    }
    for (auto& c : coeffs_) {
      if (c.empty()) c.push_back(0.0);
      for (double v : c) require_finite(v, "piecewise polynomial coefficient");
    }
    cumulative_.assign(breaks_.size(), 0.0);
    for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
      cumulative_[i + 1] =
          cumulative_[i] + segment_integral(i, breaks_[i + 1] - breaks_[i]);
    }
  }

  static PiecewisePolynomial constant(double v) {
    return PiecewisePolynomial({0.0}, {{v}});
  }

  /// Piecewise constant: `values[i]` on [breaks[i], breaks[i+1]).
  static PiecewisePolynomial piecewise_constant(std::vector<double> breaks,
                                                const std::vector<double>& values) {
    std::vector<std::vector<double>> c;
    c.reserve(values.size());
    for (double v : values) c.push_back({v});
    return PiecewisePolynomial(std::move(breaks), std::move(c));
  }

  double operator()(double s) const {
    const std::size_t i = segment(s);
    return horner(coeffs_[i], s - breaks_[i]);
  }

  /// Exact integral from breaks[0] to s.
  double antiderivative(double s) const {
    if (s <= breaks_.front()) {
      return -segment_integral(0, breaks_.front() - s);
    }
    const std::size_t i = segment(s);
    return cumulative_[i] + segment_integral(i, s - breaks_[i]);
  }

  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<std::vector<double>>& coefficients() const {
    return coeffs_;
  }

  bool is_piecewise_constant() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(),
                       [](const auto& c) {
                         return std::all_of(c.begin() + 1, c.end(),
                                            [](double v) { return v == 0.0; });
                       });
  }

  /// sup |p| over [breaks[0], hi]; exact for piecewise constants, sampled
  /// (64 points per segment plus ends) otherwise.
  double sup_abs(double hi) const {
    double best = 0.0;
    for (std::size_t i = 0; i < breaks_.size(); ++i) {
      const double lo = breaks_[i];
      if (lo > hi) break;
      const double end =
          (i + 1 < breaks_.size()) ? std::min(breaks_[i + 1], hi) : hi;
      const int n = coeffs_[i].size() == 1 ? 1 : 64;
      for (int k = 0; k <= n; ++k) {
        const double s = lo + (end - lo) * k / n;
        best = std::max(best, std::abs(horner(coeffs_[i], s - lo)));
      }
    }
    return best;
  }

 private:
  static double horner(const std::vector<double>& c, double s) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * s + *it;
    return acc;
  }

  double segment_integral(std::size_t i, double len) const {
    const auto& c = coeffs_[i];
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) {
      acc = acc * len + c[k] / static_cast<double>(k + 1);
    }
    return acc * len;
  }

  std::size_t segment(double s) const {
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), s);
    if (it == breaks_.begin()) return 0;
    return static_cast<std::size_t>(it - breaks_.begin()) - 1;
  }

  std::vector<double> breaks_;
  std::vector<std::vector<double>> coeffs_;
  std::vector<double> cumulative_;
};

}  // namespace laxol
