// Copyright 2026 The ssvqd Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "ssvqd/checks.hpp"
#include "ssvqd/drivers.hpp"

using namespace ssvqd;

namespace {

const MolecularIntegrals& h2() {
  static const MolecularIntegrals ints = read_fcidump(oracle::data_path("h2_631g.fcidump"));
  return ints;
}

OptimizerConfig h2_config() {
  OptimizerConfig cfg;
  cfg.outer_tol = 1e-4;
  return cfg;
}

}  // namespace

TEST(Drivers, WeightedSumsOfReferenceEnergies) {
  EXPECT_NEAR(weighted_sum_report({-4.430, -4.427, -4.349, -4.334, -4.221}, SAWeights::descending(5).w), -65.793, 2e-3);
  EXPECT_NEAR(weighted_sum_report({-9.010, -8.896, -8.882, -8.858}, SAWeights::descending(4).w), -89.352, 2e-3);
  EXPECT_THROW(weighted_sum_report({-1.0, -2.0}, {1.0}), ShapeError);
  EXPECT_THROW(SAWeights({0.0, 0.0}), ConfigError);
  EXPECT_THROW(SAWeights({1.0, -1.0}), ConfigError);
}

TEST(Drivers, ConfigValidation) {
  OptimizerConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.eta = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.inner_steps = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.outer_tol = -1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  DeflationConfig d{{15.0, -1.0}, 15.0};
  EXPECT_EQ(d.beta(0), 15.0);
  EXPECT_EQ(d.beta(5), 15.0);
  EXPECT_THROW(d.beta(1), ConfigError);
  EXPECT_THROW(SolverContext(h2(), 10, 1, 1), ConfigError);
}

TEST(Drivers, CircuitPhaseReachesActiveSpaceGroundState) {
  const SolverContext ctx(h2(), 4, 1, 1);
  const auto solver = make_ansatz_solver(ctx.space, h2_config());
  const PartialUnitary u = PartialUnitary::padded_identity(4, 2);
  const ThetaProblem p = make_theta_problem(h2(), u, {}, DeflationConfig{}, ctx.space);
  const double exact = oracle::dense_spectrum(rotate_integrals(h2(), u.block()), 1, 1)[0];
  const ThetaOutcome t = solver->solve(p, ctx.space, solver->initial_theta());
  EXPECT_NEAR(t.value, exact, 1e-3);
  const ThetaOutcome again = solver->solve(p, ctx.space, solver->initial_theta());
  EXPECT_EQ(t.theta, again.theta);
  for (std::size_t i = 1; i < t.history.size(); ++i) EXPECT_LE(t.history[i], t.history[i - 1]);
}

TEST(Drivers, MatrixAndRdmObjectivesAgree) {
  std::mt19937_64 rng(41);
  const SolverContext ctx(h2(), 4, 1, 1);
  const AnsatzCircuit circuit = build_uccsd(4, 1, 1, 2);
  const FockVector ref = hf_reference(4, 1, 1);
  StateSolution lower;
  lower.u = PartialUnitary::random(4, 2, rng);
  lower.state = random_sector_state(4, 1, 1, rng);
  const PartialUnitary u = PartialUnitary::random(4, 2, rng);
  std::vector<double> theta(circuit.n_params());
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  for (auto& x : theta) x = angle(rng);
  const DeflationConfig d;
  const ThetaProblem p = make_theta_problem(h2(), u, {lower}, d, ctx.space);
  const double via_matrix = p.objective(ctx.space.restrict(apply_ansatz(circuit, theta, ref)));
  EXPECT_NEAR(vqd_objective(circuit, ref, theta, u, {lower}, d, h2()), via_matrix, 1e-12);
  // Same state and basis as the lower state: the penalty saturates.
  lower.state = apply_ansatz(circuit, theta, ref);
  lower.u = u;
  const double e = rotated_energy(u, measure_rdms(lower.state), h2());
  EXPECT_NEAR(vqd_objective(circuit, ref, theta, u, {lower}, d, h2()), e + 15.0, 1e-10);
  EXPECT_NEAR(vqd_objective(circuit, ref, theta, u, {}, d, h2()), e, 1e-12);
}

TEST(Drivers, GroundOrbitalPhaseIsMonotone) {
  const SolverContext ctx(h2(), 4, 1, 1);
  const FockVector hf = hf_reference(4, 1, 1);
  OptimizerConfig cfg = h2_config();
  const OrbitalPhaseResult o = optimize_orbitals(ctx.model, spin_sum(measure_rdms(hf)), hf,
                                                 PartialUnitary::padded_identity(4, 2), {}, DeflationConfig{}, cfg);
  ASSERT_GT(o.energy_history.size(), 1u);
  for (std::size_t i = 1; i < o.energy_history.size(); ++i) EXPECT_LE(o.energy_history[i], o.energy_history[i - 1] + 1e-14);
  EXPECT_LT(o.u.orthonormality_defect(), 1e-12);
}

TEST(Drivers, FreezingIntervalDoesNotChangeTheOrbitalOptimum) {
  const SolverContext ctx(h2(), 4, 1, 1);
  const auto solver = make_ansatz_solver(ctx.space, h2_config());
  const DeflationConfig d;
  OptimizerConfig cfg = h2_config();
  const std::vector<StateSolution> lower =
      solve_ssvqd(ctx, 1, {}, *solver, cfg, d);
  const ThetaProblem p = make_theta_problem(h2(), PartialUnitary::padded_identity(4, 2), lower, d, ctx.space);
  const ThetaOutcome t = solver->solve(p, ctx.space, solver->initial_theta());
  const SpinSummedRdm rdm = spin_sum(measure_rdms(t.state));
  cfg.orbital_tol = 1e-11;
  cfg.max_orbital_cycles = 1000;
  const OrbitalPhaseResult l100 =
      optimize_orbitals(ctx.model, rdm, t.state, PartialUnitary::padded_identity(4, 2), lower, d, cfg);
  cfg.inner_steps = 1;
  cfg.max_orbital_cycles = 100000;
  const OrbitalPhaseResult l1 =
      optimize_orbitals(ctx.model, rdm, t.state, PartialUnitary::padded_identity(4, 2), lower, d, cfg);
  EXPECT_NEAR(l100.objective, l1.objective, 1e-6);
}

TEST(Drivers, H2StateSpecificSolve) {
  const SolverContext ctx(h2(), 4, 1, 1);
  const OptimizerConfig cfg = h2_config();
  const auto solver = make_ansatz_solver(ctx.space, cfg);
  const std::vector<StateSolution> s = solve_ssvqd(ctx, 2, {}, *solver, cfg, DeflationConfig{});
  ASSERT_EQ(s.size(), 2u);
  const Eigen::VectorXd fci = oracle::dense_spectrum(h2(), 1, 1);
  EXPECT_TRUE(s[0].converged);
  EXPECT_TRUE(s[1].converged);
  EXPECT_LE(std::abs(s[0].energy - fci[0]) / std::abs(fci[0]), 2.9e-3 * 1.5);
  EXPECT_LE(std::abs(s[1].energy - fci[1]) / std::abs(fci[1]), 1.0e-3 * 1.5);
  EXPECT_LT(s[1].final_overlaps.at(0), 1e-8);
  EXPECT_TRUE(std::isfinite(s[0].initial_energy));
  EXPECT_LT(s[0].trace.back().delta_energy, cfg.outer_tol);

  // Restarting from the converged point terminates after one two-step iteration.
  const StateSolution again = solve_state_ssvqd(ctx, 1, {}, StateInit{s[0].u, s[0].theta}, *solver, cfg, DeflationConfig{});
  EXPECT_EQ(again.trace.size(), 1u);
  EXPECT_TRUE(again.converged);
}

TEST(Drivers, ZeroOuterBudgetIsUnconverged) {
  const SolverContext ctx(h2(), 4, 1, 1);
  OptimizerConfig cfg = h2_config();
  cfg.max_outer = 0;
  const auto solver = make_ansatz_solver(ctx.space, cfg);
  const std::vector<StateSolution> s = solve_ssvqd(ctx, 1, {}, *solver, cfg, DeflationConfig{});
  EXPECT_FALSE(s[0].converged);
  EXPECT_TRUE(s[0].trace.empty());
  EXPECT_NEAR(s[0].energy, h2().h(0, 0) * 2 + h2().eri(0, 0, 0, 0), 1e-12);
}

TEST(Drivers, StateAveragedSingleStateBeatsReference) {
  const SolverContext ctx(h2(), 4, 1, 1);
  const OptimizerConfig cfg = h2_config();
  const auto solver = make_ansatz_solver(ctx.space, cfg);
  const SavqdResult r = solve_savqd(ctx, 1, PartialUnitary::padded_identity(4, 2), SAWeights({1.0}), *solver, cfg,
                                    DeflationConfig{});
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.states[0].energy, -1.847);
  EXPECT_THROW(solve_savqd(ctx, 2, PartialUnitary::padded_identity(4, 2), SAWeights({1.0}), *solver, cfg,
                           DeflationConfig{}),
               ConfigError);
}

TEST(Drivers, ExactCircuitDeflationRecoversSpectrum) {
  DeflationOracleOptions opt;
  opt.instances = 3;
  for (const auto& c : deflation_oracle(5, opt)) EXPECT_TRUE(c.passed()) << c.name << " worst " << c.worst;
}
