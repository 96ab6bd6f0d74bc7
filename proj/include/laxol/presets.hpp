#pragma once

/// \file
/// Named test problems.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "laxol/flux.hpp"
#include "laxol/numerics.hpp"
#include "laxol/piecewise.hpp"
#include "laxol/problem.hpp"
#include "laxol/source.hpp"

namespace laxol {

struct PresetOverrides {
  std::optional<double> t_max;
  std::optional<double> x_max;
  /// Schedule cut-off N for example-1-2.
  int n_cut = 3;
  Tolerances tol{};
  int beta_cells = 4096;
};

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{
      "zero",         "burgers-riemann", "burgers-boundary",
      "amplified-constant", "example-1-1", "example-1-2"};
  return names;
}

/// u_b for example-1-2: 60 on (1/(2n pi), 1/((2n-1) pi)), 7204 n (n+1) pi^2
/// on (1/((2n+1) pi), 1/(2n pi)) for n <= N, and 60 elsewhere.
inline PiecewisePolynomial example_1_2_boundary(int n_cut) {
  const double pi = std::numbers::pi;
  std::vector<double> breaks{0.0};
  std::vector<double> values{60.0};
  for (int k = 2 * n_cut + 1; k >= 1; --k) {
    breaks.push_back(1.0 / (k * pi));
    if (k == 1) {
      values.push_back(60.0);
    } else if (k % 2 == 1) {
      // (1/(k pi), 1/((k-1) pi)) with k = 2n + 1.
      const int n = (k - 1) / 2;
      values.push_back(7204.0 * n * (n + 1) * pi * pi);
    } else {
      values.push_back(60.0);
    }
  }
  return PiecewisePolynomial::piecewise_constant(breaks, values);
}

inline Problem make_preset(const std::string& name,
                           const PresetOverrides& o = {}) {
  auto opts = [&](double t_default) {
    SourceOptions s;
    s.t_max = o.t_max.value_or(t_default);
    s.tol_quad = o.tol.tol_quad;
    s.beta_cells = o.beta_cells;
    return s;
  };
  FluxOptions fo;
  fo.tol_root = o.tol.tol_root;
  using PP = PiecewisePolynomial;
  if (name == "zero") {
    return Problem(name, FluxModel::burgers(fo), SourceModel::zero(opts(1.0)),
                   PP::constant(0.0), PP::constant(0.0), o.x_max.value_or(2.0),
                   o.tol);
  }
  if (name == "burgers-riemann") {
    return Problem(name, FluxModel::burgers(fo), SourceModel::zero(opts(1.0)),
                   PP::piecewise_constant({0.0, 1.0}, {1.0, 0.0}),
                   PP::constant(1.0), o.x_max.value_or(4.0), o.tol);
  }
  if (name == "burgers-boundary") {
    return Problem(name, FluxModel::burgers(fo), SourceModel::zero(opts(1.0)),
                   PP::constant(0.0), PP::constant(1.0), o.x_max.value_or(2.0),
                   o.tol);
  }
  if (name == "amplified-constant") {
    return Problem(name, FluxModel::burgers(fo),
                   SourceModel::constant(1.0, opts(1.0)), PP::constant(1.0),
                   PP::constant(0.0), o.x_max.value_or(4.0), o.tol);
  }
  if (name == "example-1-1") {
    return Problem(name, FluxModel::shifted_quadratic(1.0, 60.0, fo),
                   SourceModel::example_1_1(opts(5.0)), PP::constant(10.0),
                   PP::constant(0.0), o.x_max.value_or(40.0), o.tol);
  }
  if (name == "example-1-2") {
    return Problem(name, FluxModel::shifted_quadratic(1.0, 60.0, fo),
                   SourceModel::example_1_2(o.n_cut,
                                            opts(1.0 / std::numbers::pi)),
                   PP::constant(0.0), example_1_2_boundary(o.n_cut),
                   o.x_max.value_or(1.0), o.tol);
  }
  throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace laxol
