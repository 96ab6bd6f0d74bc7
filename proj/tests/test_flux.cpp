#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "laxol/flux.hpp"

using namespace laxol;

namespace {

// Brute-force sup over a grid; the test's own route to f*.
double grid_dual(const FluxModel& f, double p, double lo, double hi, int n) {
  double best = -1e300;
  for (int i = 0; i <= n; ++i) {
    const double u = lo + (hi - lo) * i / n;
    best = std::max(best, p * u - f.f(u));
  }
  return best;
}

// Root of an increasing function by plain bisection.
template <typename F>
double root(const F& g, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (lo + hi);
    (g(m) < 0.0 ? lo : hi) = m;
  }
  return 0.5 * (lo + hi);
}

std::vector<FluxModel> sample_fluxes() {
  return {FluxModel::burgers(), FluxModel::shifted_quadratic(1.0, 60.0),
          FluxModel::polynomial({0.0, 0.0, 0.0, 0.0, 0.25}),
          FluxModel::polynomial({1.0, -2.0, 0.5, 0.0, 0.25})};
}

}  // namespace

TEST(Flux, ShiftedQuadraticValues) {
  const auto f = FluxModel::shifted_quadratic(1.0, 60.0);
  EXPECT_DOUBLE_EQ(f.f(0.0), 1800.0);
  EXPECT_DOUBLE_EQ(f.f(60.0), 0.0);
  EXPECT_DOUBLE_EQ(f.fprime(10.0), -50.0);
  EXPECT_DOUBLE_EQ(f.lambda_f(), 60.0);
}

TEST(Flux, BurgersValues) {
  const auto f = FluxModel::burgers();
  EXPECT_DOUBLE_EQ(f.f(3.0), 4.5);
  EXPECT_DOUBLE_EQ(f.fprime_inverse(3.0), 3.0);
  EXPECT_DOUBLE_EQ(f.lambda_f(), 0.0);
  EXPECT_NEAR(f.legendre_dual(0.0), 0.0, 1e-12);
}

TEST(Flux, InverseDerivativeQuartic) {
  const auto f = FluxModel::polynomial({0.0, 0.0, 0.0, 0.0, 0.25});
  EXPECT_NEAR(f.fprime_inverse(8.0), 2.0, 1e-9);
  EXPECT_NEAR(f.fprime_inverse(-27.0), -3.0, 1e-9);
  EXPECT_NEAR(FluxModel::shifted_quadratic(1.0, 60.0).fprime_inverse(0.0), 60.0,
              1e-12);
}

TEST(Flux, DualAgainstGridMaximum) {
  const auto q = FluxModel::shifted_quadratic(1.0, 60.0);
  EXPECT_NEAR(q.legendre_dual(1.0), 60.5, 1e-9);
  const auto f = FluxModel::polynomial({0.0, 0.0, 0.0, 0.0, 0.25});
  EXPECT_NEAR(f.legendre_dual(1.0), 0.75, 1e-9);
  for (double p : {-5.0, -1.0, 0.3, 1.0, 4.0}) {
    EXPECT_NEAR(f.legendre_dual(p), grid_dual(f, p, -4.0, 4.0, 400000), 1e-6)
        << "p = " << p;
  }
}

TEST(Flux, LambdaIsRootOfDerivative) {
  const auto f = FluxModel::polynomial({0.0, 0.0, 0.5, 0.0, 0.25});
  EXPECT_NEAR(f.lambda_f(), 0.0, 1e-10);
  const auto g = FluxModel::polynomial({1.0, -2.0, 0.5, 0.0, 0.25});
  const double ref = root([](double u) { return -2.0 + u + u * u * u; }, -10, 10);
  EXPECT_NEAR(g.lambda_f(), ref, 1e-9);
  EXPECT_NEAR(g.fprime(g.lambda_f()), 0.0, 1e-8);
}

TEST(Flux, DualIdentityProperty) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> P(-20.0, 20.0);
  for (const auto& f : sample_fluxes()) {
    for (int i = 0; i < 200; ++i) {
      const double p = P(rng);
      const double v = f.legendre_dual(f.fprime(p));
      EXPECT_NEAR(v, p * f.fprime(p) - f.f(p), 1e-8 * (1.0 + std::abs(v)));
    }
  }
}

TEST(Flux, InverseRoundTripProperty) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-15.0, 15.0);
  for (const auto& f : sample_fluxes()) {
    for (int i = 0; i < 200; ++i) {
      const double u = U(rng);
      EXPECT_NEAR(f.fprime_inverse(f.fprime(u)), u, 1e-8 * (1.0 + std::abs(u)));
    }
  }
}

TEST(Flux, YoungInequalityProperty) {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> U(-10.0, 10.0);
  for (const auto& f : sample_fluxes()) {
    for (int i = 0; i < 500; ++i) {
      const double p = U(rng), u = U(rng);
      const double lhs = f.f(u) + f.legendre_dual(p);
      EXPECT_GE(lhs, p * u - 1e-8 * (1.0 + std::abs(lhs)));
    }
  }
}

TEST(Flux, DerivativesMatchFiniteDifferences) {
  for (const auto& f : sample_fluxes()) {
    for (double u : {-3.0, -0.5, 0.0, 1.25, 4.0}) {
      const double h = 1e-5;
      EXPECT_NEAR(f.fprime(u), (f.f(u + h) - f.f(u - h)) / (2 * h),
                  1e-5 * (1.0 + std::abs(f.fprime(u))));
      EXPECT_NEAR(f.fsecond(u), (f.fprime(u + h) - f.fprime(u - h)) / (2 * h),
                  1e-5 * (1.0 + std::abs(f.fsecond(u))));
      EXPECT_GE(f.fsecond(u), 0.0);
    }
  }
}

TEST(Flux, RejectsInvalidFluxes) {
  EXPECT_THROW(FluxModel::polynomial({0.0, 0.0, 0.0, 1.0}), ConfigError);
  EXPECT_THROW(FluxModel::polynomial({0.0, 0.0, -1.0, 0.0, 0.25}), ConfigError);
  EXPECT_THROW(FluxModel::shifted_quadratic(-1.0, 0.0), ConfigError);
  EXPECT_THROW(FluxModel::shifted_quadratic(0.0, 0.0), ConfigError);
}

TEST(Flux, RejectsNonFiniteArguments) {
  const auto f = FluxModel::burgers();
  EXPECT_THROW(f.fprime_inverse(std::nan("")), ConfigError);
  EXPECT_THROW(f.legendre_dual(INFINITY), ConfigError);
}
