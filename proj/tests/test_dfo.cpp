// Copyright 2026 The ssvqd Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "ssvqd/dfo.hpp"

using namespace ssvqd;

namespace {

double rosenbrock(std::span<const double> x) {
  return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
}

double quadratic(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (i + 1.0) * std::pow(x[i] - 0.1 * i, 2);
  return s;
}

/// Degree-two trigonometric polynomial in each coordinate, minimum -3 at (1, -0.5, 2).
double trig(std::span<const double> x) {
  return -std::cos(x[0] - 1.0) - std::cos(x[1] + 0.5) - std::cos(2.0 * (x[2] - 2.0));
}

bool non_increasing(const std::vector<double>& h) {
  for (std::size_t i = 1; i < h.size(); ++i)
    if (h[i] > h[i - 1]) return false;
  return true;
}

}  // namespace

TEST(Dfo, ParsesMethodNames) {
  EXPECT_EQ(parse_theta_method("simplex"), ThetaMethod::simplex);
  EXPECT_EQ(parse_theta_method("sinusoidal"), ThetaMethod::sinusoidal);
  EXPECT_EQ(parse_theta_method("bfgs"), ThetaMethod::bfgs);
  EXPECT_EQ(to_string(ThetaMethod::bfgs), "bfgs");
  EXPECT_THROW(parse_theta_method("cobyla"), ConfigError);
}

TEST(Dfo, SimplexSolvesRosenbrock) {
  MinimizeOptions opt;
  opt.max_evaluations = 5000;
  opt.ftol = 1e-14;
  const MinimizeResult r = nelder_mead(rosenbrock, {-1.2, 1.0}, opt);
  EXPECT_NEAR(r.x[0], 1.0, 1e-3);
  EXPECT_NEAR(r.x[1], 1.0, 2e-3);
  EXPECT_LE(r.evaluations, 5000);
  EXPECT_TRUE(non_increasing(r.history));
}

TEST(Dfo, QuasiNewtonSolvesQuadratic) {
  const MinimizeResult r = quasi_newton(quadratic, std::vector<double>(6, 1.0));
  EXPECT_LT(r.value, 1e-10);
  EXPECT_TRUE(non_increasing(r.history));
}

TEST(Dfo, SinusoidalSolvesTrigonometricObjective) {
  const MinimizeResult r = sequential_sinusoidal(trig, {0.0, 0.0, 0.0});
  EXPECT_NEAR(r.value, -3.0, 1e-10);
  EXPECT_TRUE(non_increasing(r.history));
}

TEST(Dfo, TrigQuadraticFitIsExact) {
  const TrigQuadratic ref{0.3, -0.7, 0.2, 0.5, -0.1};
  std::array<double, 5> f{};
  for (int k = 0; k < 5; ++k) f[static_cast<std::size_t>(k)] = ref(2.0 * std::numbers::pi * k / 5.0);
  const TrigQuadratic q = TrigQuadratic::fit(f);
  for (double t = -3.0; t < 3.0; t += 0.37) EXPECT_NEAR(q(t), ref(t), 1e-13);
  const double t = q.argmin();
  for (double s = -3.1; s < 3.1; s += 0.01) EXPECT_LE(q(t), q(s) + 1e-12);
}

TEST(Dfo, BudgetExhaustionIsFlaggedNotThrown) {
  MinimizeOptions opt;
  opt.max_evaluations = 30;
  for (auto m : {ThetaMethod::simplex, ThetaMethod::bfgs}) {
    const MinimizeResult r = minimize(m, rosenbrock, {-1.2, 1.0}, opt);
    EXPECT_TRUE(r.budget_exhausted) << to_string(m);
    EXPECT_LE(r.evaluations, 30) << to_string(m);
    EXPECT_LE(r.value, rosenbrock(std::vector<double>{-1.2, 1.0})) << to_string(m);
  }
  opt.max_evaluations = 8;
  const MinimizeResult r = minimize(ThetaMethod::sinusoidal, trig, {0.0, 0.0, 0.0}, opt);
  EXPECT_TRUE(r.budget_exhausted);
  EXPECT_LE(r.evaluations, 8);
}

TEST(Dfo, MultistartIsDeterministicAndNoWorse) {
  MinimizeOptions opt;
  opt.restarts = 3;
  opt.seed = 42;
  for (auto m : {ThetaMethod::simplex, ThetaMethod::sinusoidal, ThetaMethod::bfgs}) {
    const MinimizeResult a = minimize(m, trig, {0.0, 0.0, 0.0}, opt);
    const MinimizeResult b = minimize(m, trig, {0.0, 0.0, 0.0}, opt);
    EXPECT_EQ(a.x, b.x) << to_string(m);
    EXPECT_EQ(a.value, b.value) << to_string(m);
    EXPECT_TRUE(non_increasing(a.history)) << to_string(m);
    MinimizeOptions single = opt;
    single.restarts = 0;
    EXPECT_LE(a.value, minimize(m, trig, {0.0, 0.0, 0.0}, single).value) << to_string(m);
  }
}
