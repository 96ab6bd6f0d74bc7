// laxol command line: solve, tabulate, trace, check and compare against the
// finite-volume oracle. Exit codes: 0 ok, 1 config error, 2 numerical
// failure, 3 failed check.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "laxol/boundary.hpp"
#include "laxol/characteristics.hpp"
#include "laxol/checks.hpp"
#include "laxol/config.hpp"
#include "laxol/io.hpp"
#include "laxol/oracle.hpp"
#include "laxol/solver.hpp"

namespace fs = std::filesystem;
using namespace laxol;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitCheck = 3;

struct Args {
  std::string config, preset, out = ".";
  double t = 0.0, x_max = 0.0;
  int cells = 0, table_n = 0, nx = 0, nt = 0;
  std::vector<std::string> checks;
  std::string probe;
  double x0 = 1.0, t0 = 0.0, dt = 0.0;
  double l1_max = 0.0;
  std::uint64_t seed = 0;
};

struct Context {
  RunConfig rc;
  double T = 0.0;
  const Problem& p() const { return *rc.problem; }
};

Context make_context(const Args& a) {
  Json j;
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) throw ConfigError("cannot open config '" + a.config + "'");
    try {
      in >> j;
    } catch (const Json::exception& e) {
      throw ConfigError(a.config + ": " + e.what());
    }
    if (!a.preset.empty()) j["preset"] = a.preset;
  } else if (!a.preset.empty()) {
    j["preset"] = a.preset;
  } else {
    throw ConfigError("either --config or --preset is required");
  }
  if (a.x_max > 0.0) j["x_max"] = a.x_max;
  if (a.t > 0.0) {
    if (!j.contains("t_max") || j["t_max"].get<double>() < a.t) j["t_max"] = a.t;
    j["grid"]["t"] = a.t;
  }
  if (a.cells > 0) j["grid"]["oracle_cells"] = a.cells;
  if (a.table_n > 0) j["grid"]["table_n"] = a.table_n;
  if (a.nx > 0) j["grid"]["nx"] = a.nx;
  if (a.nt > 0) j["grid"]["nt"] = a.nt;
  if (a.seed > 0) j["grid"]["seed"] = a.seed;
  Context c{parse_config(j), 0.0};
  c.T = c.rc.grid.t > 0.0 ? c.rc.grid.t : c.p().t_max();
  if (c.T > c.p().t_max() * (1.0 + 1e-12)) {
    throw ConfigError("--t beyond the problem horizon");
  }
  return c;
}

Json base_report(const std::string& command, const Context& c) {
  return {{"command", command},
          {"problem", c.p().name()},
          {"x_max", c.p().x_max()},
          {"t_max", c.p().t_max()},
          {"t", c.T},
          {"tolerances", tolerances_json(c.p().tol())},
          {"grid", grid_json(c.rc.grid)}};
}

std::ofstream open_out(const Args& a, const std::string& name) {
  fs::create_directories(a.out);
  std::ofstream os(fs::path(a.out) / name);
  if (!os) throw ConfigError("cannot write " + (fs::path(a.out) / name).string());
  return os;
}

void write_report(const Args& a, const Json& rep) {
  auto os = open_out(a, "report.json");
  os << rep.dump(2) << '\n';
}

BoundaryTable make_table(const Context& c) {
  TableOptions to;
  to.nodes = c.rc.grid.table_n;
  return build_table(c.p(), to);
}

Solver make_solver(const Context& c, const BoundaryTable& tab) {
  SolverOptions so;
  so.scan_cells = c.rc.grid.scan_cells;
  return Solver(c.p(), &tab, so);
}

std::vector<double> field_xs(const Context& c) {
  return linspace(0.0, c.p().x_max(), static_cast<std::size_t>(c.rc.grid.nx));
}

std::vector<double> field_ts(const Context& c) {
  const int nt = c.rc.grid.nt;
  std::vector<double> ts;
  for (int k = 1; k <= nt; ++k) ts.push_back(c.T * k / nt);
  return ts;
}

/// "X1,T1:X2,T2" -> h-curve between the two points.
Json probe_hcurve(const Context& c, const std::string& text) {
  double x1, t1, x2, t2;
  char c1, c2, c3;
  std::istringstream in(text);
  if (!(in >> x1 >> c1 >> t1 >> c2 >> x2 >> c3 >> t2) || c1 != ',' ||
      c2 != ':' || c3 != ',') {
    throw ConfigError("--probe-hcurve: expected X1,T1:X2,T2");
  }
  if (t1 < t2) {
    std::swap(x1, x2);
    std::swap(t1, t2);
  }
  const auto& hc = c.p().curves();
  const auto spec = hc.solve_h(x1, t1, x2, t2);
  const auto m = hc.curve_min(spec);
  bool admissible = false;
  switch (spec.kind) {
    case CurveKind::ToInitial:
      admissible = hc.admissible_initial_curve(spec, x1, c.p().tol().initial_mode);
      break;
    case CurveKind::ToBoundary:
      admissible = hc.admissible_boundary_curve(spec, x1);
      break;
    case CurveKind::Interior:
      admissible = m.value >= -hc.eps_adm(x1);
      break;
  }
  return {{"from", {x1, t1}},
          {"to", {x2, t2}},
          {"y0", spec.y0},
          {"bracket_valid", spec.bracket_valid},
          {"curve_min", {{"t", m.x}, {"x", m.value}}},
          {"cost", static_cast<double>(hc.cost(spec))},
          {"admissible", admissible}};
}

int cmd_solve(const Args& a) {
  const auto c = make_context(a);
  auto rep = base_report("solve", c);
  if (!a.probe.empty()) {
    rep["probe"] = probe_hcurve(c, a.probe);
    std::cout << "probe y0 = " << rep["probe"]["y0"].get<double>()
              << " curve_min = " << rep["probe"]["curve_min"]["x"].get<double>()
              << " admissible = "
              << (rep["probe"]["admissible"].get<bool>() ? "true" : "false")
              << '\n';
  }
  const auto tab = make_table(c);
  const auto solver = make_solver(c, tab);
  const auto field = solver.solve_grid(field_xs(c), field_ts(c));
  {
    auto os = open_out(a, "field.csv");
    write_field_csv(os, field);
  }
  {
    auto os = open_out(a, "jumps.csv");
    write_jumps_csv(os, field);
  }
  {
    auto os = open_out(a, "table.csv");
    write_table_csv(os, tab);
  }
  std::size_t njumps = 0;
  for (const auto& row : field.jumps) njumps += row.size();
  rep["field"] = {{"points", field.xs.size() * field.ts.size()},
                  {"failures", field.failures},
                  {"jumps", njumps}};
  rep["status"] = field.failures == 0 ? "ok" : "numerical-failure";
  write_report(a, rep);
  std::cout << "solved " << field.xs.size() << " x " << field.ts.size()
            << " points, " << njumps << " jumps, " << field.failures
            << " failures\n";
  return field.failures == 0 ? 0 : kExitNumerical;
}

int cmd_table(const Args& a) {
  const auto c = make_context(a);
  const auto tab = make_table(c);
  {
    auto os = open_out(a, "table.csv");
    write_table_csv(os, tab);
  }
  auto rep = base_report("boundary-table", c);
  Json counts = Json::object();
  for (auto m : tab.mechanism) {
    counts[mechanism_name(m)] = counts.value(mechanism_name(m), 0) + 1;
  }
  rep["nodes"] = tab.size();
  rep["mechanisms"] = counts;
  rep["W_end"] = static_cast<double>(tab.W.back());
  rep["status"] = "ok";
  write_report(a, rep);
  std::cout << "W(0, " << tab.horizon() << ") = " << static_cast<double>(tab.W.back())
            << '\n';
  return 0;
}

int cmd_trace(const Args& a) {
  const auto c = make_context(a);
  const auto tab = make_table(c);
  const auto solver = make_solver(c, tab);
  const double t0 = a.t0 > 0.0 ? a.t0 : 0.1 * c.T;
  const double dt = a.dt > 0.0 ? a.dt : (c.T - t0) / 200.0;
  const auto curve = trace(solver, a.x0, t0, c.T, dt);
  {
    auto os = open_out(a, "curve.csv");
    write_curve_csv(os, curve);
  }
  auto rep = base_report("trace", c);
  rep["x0"] = a.x0;
  rep["t0"] = t0;
  rep["dt"] = dt;
  rep["x_end"] = curve.x.empty() ? kNaN : curve.x.back();
  rep["clipped"] = curve.clipped;
  rep["relocations"] = curve.relocations.size();
  rep["status"] = curve.ok ? "ok" : "numerical-failure";
  if (!curve.ok) rep["error"] = curve.error;
  write_report(a, rep);
  return curve.ok ? 0 : kExitNumerical;
}

int cmd_triangles(const Args& a) {
  const auto c = make_context(a);
  const auto tab = make_table(c);
  const auto solver = make_solver(c, tab);
  const auto xs = field_xs(c);
  std::vector<CharTriangle> tris;
  for (double x : xs) tris.push_back(build_triangle(solver, x, c.T));
  {
    auto os = open_out(a, "triangles.csv");
    write_triangles_csv(os, tris);
  }
  const auto lemma = check_triangle_cover(solver, c.T, xs);
  auto rep = base_report("triangles", c);
  rep["disjoint"] = lemma.disjoint;
  rep["covering"] = lemma.covering;
  rep["worst_overlap"] = lemma.worst_overlap;
  rep["worst_gap"] = lemma.worst_gap;
  rep["notes"] = lemma.notes;
  rep["status"] = lemma.pass() ? "ok" : "check-failed";
  write_report(a, rep);
  std::cout << "triangles: " << (lemma.pass() ? "pass" : "FAIL") << '\n';
  return lemma.pass() ? 0 : kExitCheck;
}

Json suite_json(const SuiteReport& r) {
  return {{"pass", r.pass()},
          {"checked", r.checked},
          {"failures", r.failures},
          {"worst", r.worst},
          {"notes", r.notes}};
}

int cmd_check(const Args& a) {
  const auto c = make_context(a);
  const auto& p = c.p();
  std::vector<std::string> names;
  for (const auto& item : a.checks) {
    std::stringstream ss(item);
    std::string n;
    while (std::getline(ss, n, ',')) {
      if (!n.empty()) names.push_back(n);
    }
  }
  if (names.empty()) names = {"bln", "entropy", "monotone", "dpp", "weak", "nip"};
  const auto tab = make_table(c);
  const auto solver = make_solver(c, tab);
  auto rep = base_report("check", c);
  bool all = true;
  std::mt19937_64 rng(c.rc.grid.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const auto mono_xs = linspace(p.x_max() / 64.0, p.x_max(), 64);
  std::vector<double> mono_ts;
  for (int k = 1; k <= 16; ++k) mono_ts.push_back(c.T * k / 16.0);
  for (const auto& n : names) {
    Json r;
    bool pass = true;
    if (n == "bln") {
      const auto ts = bln_times(p, c.T, 50);
      std::size_t bad = 0;
      Json fails = Json::array();
      for (const auto& v : bln_suite(solver, ts)) {
        if (!v.pass) {
          ++bad;
          fails.push_back({{"t", v.t}, {"detail", v.detail}});
        }
      }
      pass = bad == 0;
      r = {{"pass", pass}, {"times", ts.size()}, {"failures", fails}};
    } else if (n == "entropy") {
      const auto field = solver.solve_grid(field_xs(c), field_ts(c));
      const auto e = entropy_check(field, p);
      pass = e.pass() && field.failures == 0;
      r = {{"pass", pass},
           {"jumps", e.checked},
           {"violations", e.violations.size()},
           {"min_margin", e.checked ? e.min_margin : 0.0}};
    } else if (n == "monotone") {
      const auto s = monotone_check(solver, mono_xs, mono_ts);
      pass = s.pass();
      r = suite_json(s);
    } else if (n == "nip") {
      const auto s = nip_check(solver, mono_xs, mono_ts);
      pass = s.pass();
      r = suite_json(s);
    } else if (n == "dpp") {
      double worst = 0.0;
      for (int k = 0; k < 100; ++k) {
        const double t = c.T * (0.1 + 0.9 * uni(rng));
        const double s = t * (0.1 + 0.8 * uni(rng));
        const double x = p.x_max() * uni(rng);
        worst = std::max(worst, solver.functional().dpp_residual(x, t, s));
      }
      pass = worst <= 2.0 * p.tol().val_tol;
      r = {{"pass", pass}, {"triples", 100}, {"worst_residual", worst}};
    } else if (n == "weak") {
      const auto field = solver.solve_grid(field_xs(c), field_ts(c));
      const auto bumps = random_bumps(10, p.x_max(), c.T, c.rc.grid.seed);
      const double res = weak_residual(field, p, bumps);
      pass = res <= 5e-3 && field.failures == 0;
      r = {{"pass", pass}, {"bumps", 10}, {"residual", res}};
    } else {
      throw ConfigError("unknown check '" + n + "'");
    }
    all = all && pass;
    rep["checks"][n] = r;
    std::cout << n << ": " << (pass ? "pass" : "FAIL") << '\n';
  }
  rep["status"] = all ? "ok" : "check-failed";
  write_report(a, rep);
  return all ? 0 : kExitCheck;
}

int cmd_oracle(const Args& a) {
  const auto c = make_context(a);
  FVConfig fc;
  fc.cells = c.rc.grid.oracle_cells;
  fc.cfl = c.rc.grid.cfl;
  fc.output_times = field_ts(c);
  const auto o = run_oracle(c.p(), fc);
  {
    auto os = open_out(a, "oracle.csv");
    write_oracle_csv(os, o);
  }
  auto rep = base_report("oracle", c);
  rep["cells"] = fc.cells;
  rep["steps"] = o.steps;
  rep["cfl_reductions"] = o.cfl_reductions;
  rep["status"] = "ok";
  write_report(a, rep);
  return 0;
}

int cmd_compare(const Args& a) {
  const auto c = make_context(a);
  FVConfig fc;
  fc.cells = c.rc.grid.oracle_cells;
  fc.cfl = c.rc.grid.cfl;
  fc.output_times = {c.T};
  const auto o = run_oracle(c.p(), fc);
  const auto tab = make_table(c);
  const auto solver = make_solver(c, tab);
  const auto field = solver.solve_grid(o.xs, {c.T});
  std::vector<double> uv;
  double norm = 0.0;
  for (const auto& s : field.samples[0]) {
    uv.push_back(s.u);
    norm += std::abs(s.u) * o.dx;
  }
  const double d = l1_distance(o.xs, uv, o.u[0], o.dx);
  const bool pass = field.failures == 0 && (a.l1_max <= 0.0 || d <= a.l1_max);
  auto rep = base_report("compare", c);
  rep["cells"] = fc.cells;
  rep["l1"] = d;
  rep["l1_relative"] = norm > 0.0 ? d / norm : d;
  rep["failures"] = field.failures;
  rep["status"] = pass ? "ok" : "check-failed";
  write_report(a, rep);
  std::cout << "L1 distance " << d << '\n';
  if (field.failures) return kExitNumerical;
  return pass ? 0 : kExitCheck;
}

void error_report(const Args& a, const std::string& cmd, const char* status,
                  const std::string& msg) {
  try {
    write_report(a, {{"command", cmd}, {"status", status}, {"error", msg}});
  } catch (const std::exception&) {
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"laxol: variational solver for u_t + f(u)_x = alpha(t) u"};
  app.require_subcommand(1);
  app.fallthrough();
  Args a;
  app.add_option("--config", a.config, "JSON problem config");
  app.add_option("--preset", a.preset, "named preset")
      ->check(CLI::IsMember(preset_names()));
  app.add_option("--out", a.out, "output directory");
  app.add_option("--t", a.t, "output time");
  app.add_option("--x-max", a.x_max, "right end of the window");
  app.add_option("--cells", a.cells, "oracle cells");
  app.add_option("--table-n", a.table_n, "boundary table nodes");
  app.add_option("--nx", a.nx, "field points in x");
  app.add_option("--nt", a.nt, "field levels in t");
  app.add_option("--seed", a.seed, "seed for random samples");

  auto* solve = app.add_subcommand("solve", "boundary table, field and jumps");
  solve->add_option("--probe-hcurve", a.probe, "report the h-curve X1,T1:X2,T2");
  app.add_subcommand("boundary-table", "W(0, t) with mechanisms");
  auto* tr = app.add_subcommand("trace", "generalized characteristic");
  tr->add_option("--x0", a.x0, "start position");
  tr->add_option("--t0", a.t0, "start time");
  tr->add_option("--dt", a.dt, "step");
  app.add_subcommand("triangles", "characteristic triangles at --t");
  auto* check = app.add_subcommand("check", "bln, entropy, monotone, dpp, weak, nip");
  check->add_option("names", a.checks, "checks to run");
  check->add_option("--check", a.checks, "comma separated checks");
  app.add_subcommand("oracle", "Godunov reference field");
  auto* cmp = app.add_subcommand("compare", "L1 distance to the oracle at --t");
  cmp->add_option("--l1-max", a.l1_max, "fail above this distance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (cmd == "solve") return cmd_solve(a);
    if (cmd == "boundary-table") return cmd_table(a);
    if (cmd == "trace") return cmd_trace(a);
    if (cmd == "triangles") return cmd_triangles(a);
    if (cmd == "check") return cmd_check(a);
    if (cmd == "oracle") return cmd_oracle(a);
    if (cmd == "compare") return cmd_compare(a);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    error_report(a, cmd, "config-error", e.what());
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    error_report(a, cmd, "numerical-failure", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    error_report(a, cmd, "numerical-failure", e.what());
    return kExitNumerical;
  }
  return kExitConfig;
}
