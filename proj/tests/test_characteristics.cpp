#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "laxol/boundary.hpp"
#include "laxol/characteristics.hpp"
#include "laxol/oracle.hpp"
#include "laxol/presets.hpp"

using namespace laxol;
using PP = PiecewisePolynomial;

namespace {

SourceOptions to(double t_max) {
  SourceOptions o;
  o.t_max = t_max;
  return o;
}

struct Case {
  Problem p;
  BoundaryTable tab;
  Solver s;
  explicit Case(Problem prob, int nodes = 256)
      : p(std::move(prob)), tab(build_table(p, {.nodes = nodes})), s(p, &tab) {}
};

Problem fan() {
  return Problem("fan", FluxModel::burgers(), SourceModel::zero(to(1.0)),
                 PP::constant(1.0), PP::constant(0.0), 2.0);
}

// u_b = 1 then 2 from t = 0.5: the faster boundary characteristics overtake
// the slower ones along x = 1.5 (t - 0.5) until t = 0.75.
Problem boundary_shock() {
  return Problem("bshock", FluxModel::burgers(), SourceModel::zero(to(0.7)),
                 PP::constant(0.0), PP::piecewise_constant({0.0, 0.5}, {1.0, 2.0}),
                 2.0);
}

double jump_near(const Solver& s, double t, double lo, double hi) {
  const auto f = s.solve_grid(linspace(lo, hi, 21), {t});
  EXPECT_EQ(f.jumps[0].size(), 1u);
  return f.jumps[0].empty() ? kNaN : f.jumps[0][0].x;
}

}  // namespace

TEST(Characteristics, SpeedAtShockIsRankineHugoniot) {
  Case r(make_preset("burgers-riemann"));
  const double xs = jump_near(r.s, 1.0, 1.0, 2.0);
  EXPECT_NEAR(xs, 1.5, 1e-6);
  const auto cs = char_speed(r.s, xs, 1.0);
  EXPECT_TRUE(cs.shock);
  EXPECT_NEAR(cs.u_left, 1.0, 1e-6);
  EXPECT_NEAR(cs.u_right, 0.0, 1e-6);
  EXPECT_NEAR(cs.speed, 0.5, 1e-6);
}

TEST(Characteristics, SpeedInSmoothRegion) {
  Case a(make_preset("amplified-constant"));
  const auto cs = char_speed(a.s, 3.0, 1.0);
  EXPECT_FALSE(cs.shock);
  EXPECT_NEAR(cs.speed, std::exp(1.0), 1e-6);
}

TEST(Characteristics, CornerTieGivesFanSpeed) {
  Case c(fan());
  for (double x : {0.25, 0.5, 0.8}) {
    const auto cs = char_speed(c.s, x, 1.0);
    EXPECT_FALSE(cs.shock);
    EXPECT_NEAR(cs.speed, x, 1e-6);
  }
}

TEST(Characteristics, SpeedBoundedByAttainedStates) {
  Case r(make_preset("burgers-riemann"));
  for (double x : linspace(0.05, 3.5, 30)) {
    EXPECT_LE(std::abs(char_speed(r.s, x, 0.8).speed), 1.0 + 1e-6);
  }
}

TEST(Characteristics, TraceSmoothCurve) {
  Case a(make_preset("amplified-constant"));
  const auto c = trace(a.s, 1.5, 0.5, 1.0, 1e-3);
  ASSERT_TRUE(c.ok) << c.error;
  const double exact = 1.5 + std::exp(1.0) - std::exp(0.5);
  EXPECT_NEAR(c.x.back(), exact, 5e-3);
  // Refining the step moves the endpoint towards the exact one.
  const auto c2 = trace(a.s, 1.5, 0.5, 1.0, 5e-4);
  EXPECT_LT(std::abs(c2.x.back() - exact), std::abs(c.x.back() - exact));
}

TEST(Characteristics, TraceFollowsShock) {
  Case b(make_preset("burgers-boundary"));
  const double x0 = jump_near(b.s, 0.5, 0.1, 0.4);
  const auto c = trace(b.s, x0, 0.5, 1.0, 2e-3);
  ASSERT_TRUE(c.ok) << c.error;
  EXPECT_NEAR(c.x.back(), 0.5, 2e-3);
  EXPECT_TRUE(std::count(c.shock.begin(), c.shock.end(), true) > 0);
}

TEST(Characteristics, TraceRejectsBadInterval) {
  Case z(make_preset("zero"), 32);
  EXPECT_THROW(trace(z.s, 0.5, 0.0, 1.0, 0.1), ConfigError);
  EXPECT_THROW(trace(z.s, 0.5, 0.5, 0.4, 0.1), ConfigError);
}

TEST(Characteristics, InitialTriangleBase) {
  Case r(make_preset("burgers-riemann"));
  const double xs = jump_near(r.s, 1.0, 1.0, 2.0);
  const auto tri = build_triangle(r.s, xs, 1.0);
  EXPECT_EQ(tri.kind, TriangleCase::Initial);
  EXPECT_NEAR(tri.base_lo, 0.5, 1e-5);
  EXPECT_NEAR(tri.base_hi, 1.5, 1e-5);
  EXPECT_NEAR(tri.left.front(), 0.5, 1e-5);
  EXPECT_NEAR(tri.right.front(), 1.5, 1e-5);
  const auto smooth = build_triangle(r.s, 0.5, 1.0);
  for (std::size_t k = 0; k < smooth.theta.size(); ++k) {
    EXPECT_NEAR(smooth.left[k], smooth.right[k], 1e-9);
  }
}

TEST(Characteristics, BoundaryTriangleBase) {
  Case b(boundary_shock());
  const double t = 0.7;
  const double xs = jump_near(b.s, t, 0.2, 0.34);
  EXPECT_NEAR(xs, 0.3, 1e-5);
  // B(tau) = W(0, tau) + x^2 / (2 (t - tau)) has equal minima at the feet of
  // the two boundary characteristics: tau = t - x and tau = t - x / 2.
  const auto tri = build_triangle(b.s, xs, t);
  EXPECT_EQ(tri.kind, TriangleCase::Boundary);
  EXPECT_NEAR(tri.base_lo, t - xs, 1e-4);
  EXPECT_NEAR(tri.base_hi, t - xs / 2.0, 1e-4);
}

TEST(Characteristics, MixedTriangleAtCornerShock) {
  Case b(make_preset("burgers-boundary"));
  const double xs = jump_near(b.s, 1.0, 0.3, 0.7);
  const auto tri = build_triangle(b.s, xs, 1.0);
  EXPECT_EQ(tri.kind, TriangleCase::Mixed);
  EXPECT_NEAR(tri.base_lo, 0.5, 1e-4);
  EXPECT_NEAR(tri.base_hi, 0.5, 1e-4);
}

TEST(Characteristics, TrianglesCoverTheLevel) {
  for (const char* name : {"zero", "burgers-riemann", "burgers-boundary"}) {
    Case c(make_preset(name));
    const auto rep = check_triangle_cover(c.s, 1.0, linspace(0.0, 2.0, 41));
    EXPECT_TRUE(rep.pass()) << name << " overlap " << rep.worst_overlap
                            << " gap " << rep.worst_gap;
  }
}

TEST(Characteristics, CorruptedTrianglesFail) {
  Case r(make_preset("burgers-riemann"));
  std::vector<CharTriangle> tris;
  const auto xs = linspace(0.0, 3.0, 31);
  for (double x : xs) tris.push_back(build_triangle(r.s, x, 1.0));
  EXPECT_TRUE(check_triangles(tris, 0.2).pass());
  auto shuffled = tris;
  std::mt19937 rng(3);
  for (auto& tr : shuffled) {
    std::shuffle(tr.left.begin(), tr.left.end() - 1, rng);
  }
  EXPECT_FALSE(check_triangles(shuffled, 0.2).disjoint);
  auto sparse = tris;
  sparse.erase(sparse.begin() + 5, sparse.begin() + 20);
  EXPECT_FALSE(check_triangles(sparse, 0.2).covering);
}

TEST(Characteristics, TrianglesGrowAlongShock) {
  Case r(make_preset("burgers-riemann"));
  const auto early = build_triangle(r.s, jump_near(r.s, 0.5, 1.0, 1.5), 0.5);
  const auto late = build_triangle(r.s, jump_near(r.s, 1.0, 1.0, 2.0), 1.0);
  EXPECT_LE(late.base_lo, early.base_lo + 1e-6);
  EXPECT_GE(late.base_hi, early.base_hi - 1e-6);
}

TEST(Characteristics, EntropyOnShocks) {
  Case r(make_preset("burgers-riemann"));
  const auto field = r.s.solve_grid(linspace(0.0, 3.0, 31), {0.5, 1.0});
  const auto rep = entropy_check(field, r.p);
  EXPECT_EQ(rep.checked, 2u);
  EXPECT_TRUE(rep.pass());
  EXPECT_NEAR(rep.min_margin, 0.5, 1e-5);
  const auto bad = entropy_check(std::vector<Jump>{{1.0, 0.5, 0.0, 1.0}}, r.p);
  EXPECT_FALSE(bad.pass());
  EXPECT_NEAR(bad.violations[0].margin, -0.5, 1e-12);
}

TEST(Characteristics, BalanceLawShock) {
  // alpha = 1: the left state is amplified to e^t before the shock.
  const Problem p("balance", FluxModel::burgers(), SourceModel::constant(1.0, to(1.0)),
                  PP::piecewise_constant({0.0, 1.0}, {1.0, 0.0}), PP::constant(1.0),
                  4.0);
  Case c(p);
  const auto field = c.s.solve_grid(linspace(0.0, 4.0, 41), {1.0});
  ASSERT_EQ(field.jumps[0].size(), 1u);
  const auto& j = field.jumps[0][0];
  EXPECT_NEAR(j.u_left, std::exp(1.0), 1e-5);
  EXPECT_NEAR(j.u_right, 0.0, 1e-6);
  EXPECT_TRUE(entropy_check(field, c.p).pass());
  FVConfig cfg;
  cfg.cells = 800;
  const auto fv = run_oracle(c.p, cfg);
  const double dx = fv.dx;
  const auto i = static_cast<std::size_t>((j.x - 10 * dx) / dx);
  EXPECT_NEAR(fv.u[0][i], j.u_left, 0.02 * j.u_left);
  EXPECT_NEAR(fv.u[0][i + 20], j.u_right, 0.02);
}
