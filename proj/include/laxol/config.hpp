#pragma once

/// \file
/// JSON run configuration: a preset or an explicit problem, tolerances and
/// grid sizes.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "laxol/flux.hpp"
#include "laxol/piecewise.hpp"
#include "laxol/presets.hpp"
#include "laxol/problem.hpp"
#include "laxol/source.hpp"

namespace laxol {

using Json = nlohmann::json;

struct GridConfig {
  int table_n = 1024;
  int nx = 201;
  int nt = 11;
  int oracle_cells = 800;
  double cfl = 0.45;
  /// Scan cells for field solves.
  int scan_cells = 256;
  /// Output time; 0 means t_max.
  double t = 0.0;
  std::uint64_t seed = 1;
};

struct RunConfig {
  std::optional<Problem> problem;
  GridConfig grid;
};

namespace detail {

template <typename T>
void read_opt(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline PiecewisePolynomial parse_data(const Json& j, const char* what) {
  if (j.is_number()) return PiecewisePolynomial::constant(j.get<double>());
  if (!j.is_object()) {
    throw ConfigError(std::string(what) + ": expected a number or an object");
  }
  if (j.contains("constant")) {
    return PiecewisePolynomial::constant(j.at("constant").get<double>());
  }
  const auto breaks = j.at("breaks").get<std::vector<double>>();
  if (j.contains("values")) {
    return PiecewisePolynomial::piecewise_constant(
        breaks, j.at("values").get<std::vector<double>>());
  }
  return PiecewisePolynomial(
      breaks, j.at("coeffs").get<std::vector<std::vector<double>>>());
}

inline FluxModel parse_flux(const Json& j, const FluxOptions& fo) {
  const auto family = j.at("family").get<std::string>();
  if (family == "shifted_quadratic") {
    return FluxModel::shifted_quadratic(j.at("a").get<double>(),
                                        j.at("c").get<double>(), fo);
  }
  if (family == "burgers") return FluxModel::burgers(fo);
  if (family == "polynomial") {
    return FluxModel::polynomial(j.at("coeffs").get<std::vector<double>>(), fo);
  }
  throw ConfigError("flux: unknown family '" + family + "'");
}

inline SourceModel parse_alpha(const Json& j, const SourceOptions& so) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "zero") return SourceModel::zero(so);
  if (kind == "constant") {
    return SourceModel::constant(j.at("value").get<double>(), so);
  }
  if (kind == "piecewise") {
    return SourceModel::piecewise(
        PiecewisePolynomial(
            j.at("breaks").get<std::vector<double>>(),
            j.at("coeffs").get<std::vector<std::vector<double>>>()),
        so);
  }
  if (kind == "table") {
    return SourceModel::table(j.at("t").get<std::vector<double>>(),
                              j.at("values").get<std::vector<double>>(), so);
  }
  if (kind == "example-1-1") return SourceModel::example_1_1(so);
  if (kind == "example-1-2") {
    return SourceModel::example_1_2(j.value("n_cut", 3), so);
  }
  throw ConfigError("alpha: unknown kind '" + kind + "'");
}

inline Tolerances parse_tolerances(const Json& j) {
  Tolerances t;
  read_opt(j, "tol_quad", t.tol_quad);
  read_opt(j, "tol_root", t.tol_root);
  read_opt(j, "val_tol", t.val_tol);
  read_opt(j, "eps_adm", t.eps_adm);
  read_opt(j, "tol_bln", t.tol_bln);
  read_opt(j, "arg_tol", t.arg_tol);
  read_opt(j, "entropy_tol", t.entropy_tol);
  read_opt(j, "scan_cells", t.scan_cells);
  if (j.contains("initial_mode")) {
    const auto m = j.at("initial_mode").get<std::string>();
    if (m == "containment") {
      t.initial_mode = AdmissibilityMode::Containment;
    } else if (m == "strict") {
      t.initial_mode = AdmissibilityMode::StrictPartialIntegral;
    } else {
      throw ConfigError("tolerances: unknown initial_mode '" + m + "'");
    }
  }
  if (!(t.tol_quad > 0.0 && t.tol_root > 0.0)) {
    throw ConfigError("tolerances: tol_quad and tol_root must be positive");
  }
  return t;
}

}  // namespace detail

inline Json tolerances_json(const Tolerances& t) {
  return {{"tol_quad", t.tol_quad},       {"tol_root", t.tol_root},
          {"val_tol", t.val_tol},         {"eps_adm", t.eps_adm},
          {"tol_bln", t.tol_bln},         {"arg_tol", t.arg_tol},
          {"entropy_tol", t.entropy_tol}, {"scan_cells", t.scan_cells},
          {"initial_mode", t.initial_mode == AdmissibilityMode::Containment
                               ? "containment"
                               : "strict"}};
}

inline Json grid_json(const GridConfig& g) {
  return {{"table_n", g.table_n},     {"nx", g.nx},
          {"nt", g.nt},               {"oracle_cells", g.oracle_cells},
          {"cfl", g.cfl},             {"scan_cells", g.scan_cells},
          {"t", g.t},                 {"seed", g.seed}};
}

/// A config either names a preset (optionally overriding t_max, x_max and
/// tolerances) or spells out flux, alpha, u0, ub, t_max and x_max.
inline RunConfig parse_config(const Json& j) {
  RunConfig rc;
  try {
    const Tolerances tol = j.contains("tolerances")
                               ? detail::parse_tolerances(j.at("tolerances"))
                               : Tolerances{};
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      detail::read_opt(g, "table_n", rc.grid.table_n);
      detail::read_opt(g, "nx", rc.grid.nx);
      detail::read_opt(g, "nt", rc.grid.nt);
      detail::read_opt(g, "oracle_cells", rc.grid.oracle_cells);
      detail::read_opt(g, "cfl", rc.grid.cfl);
      detail::read_opt(g, "scan_cells", rc.grid.scan_cells);
      detail::read_opt(g, "t", rc.grid.t);
      detail::read_opt(g, "seed", rc.grid.seed);
    }
    if (rc.grid.table_n < 2 || rc.grid.nx < 2 || rc.grid.nt < 1 ||
        rc.grid.oracle_cells < 2 || rc.grid.scan_cells < 8 ||
        !(rc.grid.cfl > 0.0) || rc.grid.t < 0.0) {
      throw ConfigError("grid: sizes and cfl must be positive");
    }
    if (j.contains("preset")) {
      for (const char* k : {"flux", "alpha", "u0", "ub"}) {
        if (j.contains(k)) {
          throw ConfigError(std::string("config: '") + k +
                            "' cannot be combined with a preset");
        }
      }
      PresetOverrides o;
      if (j.contains("t_max")) o.t_max = j.at("t_max").get<double>();
      if (j.contains("x_max")) o.x_max = j.at("x_max").get<double>();
      detail::read_opt(j, "n_cut", o.n_cut);
      o.tol = tol;
      rc.problem.emplace(make_preset(j.at("preset").get<std::string>(), o));
      return rc;
    }
    FluxOptions fo;
    fo.tol_root = tol.tol_root;
    SourceOptions so;
    so.t_max = j.at("t_max").get<double>();
    so.tol_quad = tol.tol_quad;
    const Json alpha = j.contains("alpha") ? j.at("alpha") : Json{{"kind", "zero"}};
    rc.problem.emplace(j.value("name", std::string("custom")),
                       detail::parse_flux(j.at("flux"), fo),
                       detail::parse_alpha(alpha, so),
                       detail::parse_data(j.at("u0"), "u0"),
                       detail::parse_data(j.at("ub"), "ub"),
                       j.at("x_max").get<double>(), tol);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return rc;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  return parse_config(j);
}

}  // namespace laxol
