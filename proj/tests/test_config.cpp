#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "laxol/boundary.hpp"
#include "laxol/config.hpp"
#include "laxol/io.hpp"

using namespace laxol;

namespace {

std::string first_lines(const std::string& s, int n) {
  std::istringstream in(s);
  std::string line, out;
  for (int i = 0; i < n && std::getline(in, line); ++i) out += line + "\n";
  return out;
}

}  // namespace

TEST(Config, PresetWithOverrides) {
  const auto rc = parse_config(Json::parse(R"({
    "preset": "burgers-riemann", "t_max": 2.0, "x_max": 5.0,
    "tolerances": {"val_tol": 1e-6, "initial_mode": "strict"},
    "grid": {"nx": 11, "nt": 3, "seed": 9}})"));
  ASSERT_TRUE(rc.problem.has_value());
  EXPECT_EQ(rc.problem->name(), "burgers-riemann");
  EXPECT_EQ(rc.problem->t_max(), 2.0);
  EXPECT_EQ(rc.problem->x_max(), 5.0);
  EXPECT_EQ(rc.problem->tol().val_tol, 1e-6);
  EXPECT_EQ(rc.problem->tol().initial_mode, AdmissibilityMode::StrictPartialIntegral);
  EXPECT_EQ(rc.grid.nx, 11);
  EXPECT_EQ(rc.grid.seed, 9u);
}

TEST(Config, ExplicitProblem) {
  const auto rc = parse_config(Json::parse(R"({
    "flux": {"family": "shifted_quadratic", "a": 1, "c": 60},
    "alpha": {"kind": "table", "t": [0, 1, 2], "values": [0.5, -1, 2]},
    "u0": {"breaks": [0, 1], "values": [2, 0]},
    "ub": 0.5, "t_max": 2, "x_max": 3})"));
  const auto& p = *rc.problem;
  EXPECT_EQ(p.flux().lambda_f(), 60.0);
  EXPECT_EQ(p.u0_at(0.5), 2.0);
  EXPECT_EQ(p.u0_at(1.5), 0.0);
  EXPECT_EQ(p.ub_at(1.0), 0.5);
  EXPECT_NEAR(p.source().alpha(0.5), -0.25, 1e-12);

  const auto poly = parse_config(Json::parse(R"({
    "flux": {"family": "polynomial", "coeffs": [0, 0, 0.5, 0, 0.25]},
    "alpha": {"kind": "piecewise", "breaks": [0, 0.5], "coeffs": [[1], [0, 2]]},
    "u0": {"constant": 1}, "ub": {"breaks": [0], "coeffs": [[0, 1]]},
    "t_max": 1, "x_max": 2})"));
  EXPECT_EQ(poly.problem->flux().degree(), 4u);
  EXPECT_NEAR(poly.problem->ub_at(0.3), 0.3, 1e-15);
}

TEST(Config, Errors) {
  auto bad = [](const char* text) {
    EXPECT_THROW(parse_config(Json::parse(text)), ConfigError) << text;
  };
  bad(R"({"preset": "nope"})");
  bad(R"({"preset": "zero", "flux": {"family": "burgers"}})");
  bad(R"({"flux": {"family": "cubic"}, "u0": 0, "ub": 0, "t_max": 1, "x_max": 1})");
  bad(R"({"flux": {"family": "burgers"}, "alpha": {"kind": "sine"},
          "u0": 0, "ub": 0, "t_max": 1, "x_max": 1})");
  bad(R"({"flux": {"family": "burgers"}, "u0": 0, "ub": 0, "t_max": 1})");
  bad(R"({"flux": {"family": "burgers"}, "u0": "x", "ub": 0, "t_max": 1, "x_max": 1})");
  bad(R"({"preset": "zero", "tolerances": {"tol_quad": -1}})");
  bad(R"({"preset": "zero", "tolerances": {"initial_mode": "loose"}})");
  bad(R"({"preset": "zero", "grid": {"nx": 1}})");
  bad(R"({"flux": {"family": "burgers"}, "u0": 0, "ub": 0, "t_max": 1, "x_max": -1})");
  EXPECT_THROW(load_config("/nonexistent/laxol.json"), ConfigError);
}

TEST(Config, LoadFromFile) {
  const std::string path = ::testing::TempDir() + "laxol_cfg.json";
  {
    std::ofstream out(path);
    out << R"({"preset": "zero", "grid": {"table_n": 64}})";
  }
  const auto rc = load_config(path);
  EXPECT_EQ(rc.grid.table_n, 64);
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  EXPECT_THROW(load_config(path), ConfigError);
  std::remove(path.c_str());
}

TEST(Config, TolerancesRoundTrip) {
  Tolerances t;
  t.val_tol = 3e-8;
  t.initial_mode = AdmissibilityMode::StrictPartialIntegral;
  const auto j = Json{{"preset", "zero"}, {"tolerances", tolerances_json(t)}};
  const auto rc = parse_config(j);
  EXPECT_EQ(rc.problem->tol().val_tol, 3e-8);
  EXPECT_EQ(rc.problem->tol().initial_mode, AdmissibilityMode::StrictPartialIntegral);
  EXPECT_EQ(tolerances_json(rc.problem->tol()), tolerances_json(t));
}

TEST(Csv, HeadersAreVersioned) {
  const auto p = make_preset("burgers-boundary");
  const auto tab = build_table(p, {.nodes = 16});
  Solver s(p, &tab);
  const auto field = s.solve_grid(linspace(0.0, 1.0, 11), {1.0});
  std::ostringstream f, j, t;
  write_field_csv(f, field);
  write_jumps_csv(j, field);
  write_table_csv(t, tab);
  EXPECT_EQ(first_lines(f.str(), 2),
            "# laxol field v1\nx,t,u,W,branch,y_lo,y_hi,tau_lo,tau_hi,ok\n");
  EXPECT_EQ(first_lines(j.str(), 2), "# laxol jumps v1\nt,x_jump,u_left,u_right\n");
  EXPECT_EQ(first_lines(t.str(), 2),
            "# laxol boundary-table v1\nt,W,mechanism,from_index,ub_bar\n");
  std::istringstream in(f.str());
  std::string line;
  int rows = -2;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 11);
}

TEST(Csv, OutputIsDeterministic) {
  const auto p = make_preset("burgers-riemann");
  auto render = [&] {
    const auto tab = build_table(p, {.nodes = 32});
    Solver s(p, &tab);
    const auto field = s.solve_grid(linspace(0.0, 3.0, 13), {0.5, 1.0});
    std::ostringstream os;
    write_field_csv(os, field);
    write_jumps_csv(os, field);
    write_table_csv(os, tab);
    return os.str();
  };
  EXPECT_EQ(render(), render());
}
