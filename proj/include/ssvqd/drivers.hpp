// Copyright 2026 The ssvqd Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file drivers.hpp
 * @brief State-specific and state-averaged orbital-optimized deflation solvers.
 *
 * State k minimizes F_k(theta, u) = E(theta, u) + sum_{j<k} beta_j O_jk with
 * O_jk = |<Psi_j| U(u_j^T u) |Psi(theta)>|^2, alternating a circuit phase at
 * fixed u with an orbital phase at fixed theta (one "two-step iteration").
 */

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ssvqd/ansatz.hpp"
#include "ssvqd/dfo.hpp"
#include "ssvqd/error.hpp"
#include "ssvqd/fci.hpp"
#include "ssvqd/fockspace.hpp"
#include "ssvqd/hamio.hpp"
#include "ssvqd/orbopt.hpp"
#include "ssvqd/partial_unitary.hpp"

namespace ssvqd {

struct DeflationConfig {
  std::vector<double> betas;  ///< per lower state; missing entries use default_beta
  double default_beta = 15.0;

  double beta(std::size_t j) const {
    const double b = j < betas.size() ? betas[j] : default_beta;
    if (!(b > 0)) throw ConfigError("deflation weight beta_" + std::to_string(j + 1) + " must be positive");
    return b;
  }
};

struct OptimizerConfig {
  double eta = 1e-3;
  int inner_steps = 100;  ///< L, orbital steps between overlap-gradient refreshes
  ThetaMethod theta_method = ThetaMethod::simplex;
  int theta_budget = 2000;  ///< objective evaluations per start
  int theta_restarts = 0;   ///< extra random starts per circuit phase
  std::uint64_t seed = 0;
  double outer_tol = 1e-4;
  int max_outer = 50;
  double orbital_tol = 1e-7;
  int max_orbital_cycles = 200;
  int reps = 2;
  bool flip_overlap_sign = false;  ///< descend on E - sum beta O instead of E + sum beta O

  void validate() const {
    if (!(eta > 0)) throw ConfigError("eta must be positive");
    if (inner_steps < 1) throw ConfigError("inner_steps must be at least 1");
    if (!(outer_tol > 0)) throw ConfigError("outer_tol must be positive");
    if (max_outer < 0) throw ConfigError("max_outer must be non-negative");
    if (theta_budget < 1) throw ConfigError("theta_budget must be at least 1");
    if (reps < 1) throw ConfigError("reps must be at least 1");
    if (theta_restarts < 0) throw ConfigError("theta_restarts must be non-negative");
  }
};

/// Positive per-state weights of the averaged objective.
struct SAWeights {
  std::vector<double> w;

  SAWeights() = default;
  explicit SAWeights(std::vector<double> weights) : w(std::move(weights)) {
    if (w.empty()) throw ConfigError("SAWeights: no weights given");
    for (double x : w)
      if (!(x > 0)) throw ConfigError("SAWeights: weights must be positive");
  }
  /// K, K-1, ..., 1.
  static SAWeights descending(int k) {
    std::vector<double> w;
    for (int i = k; i >= 1; --i) w.push_back(i);
    return SAWeights(std::move(w));
  }
};

inline double weighted_sum_report(const std::vector<double>& energies, const std::vector<double>& weights) {
  if (energies.size() != weights.size())
    throw ShapeError("weighted_sum_report: " + std::to_string(energies.size()) + " energies vs " +
                     std::to_string(weights.size()) + " weights");
  const SAWeights checked(weights);
  double s = 0.0;
  for (std::size_t i = 0; i < energies.size(); ++i) s += checked.w[i] * energies[i];
  return s;
}

/// Active space of N spin-orbitals with a fixed particle sector.
struct ActiveSpace {
  int n_orbitals = 0;
  int n_alpha = 0;
  int n_beta = 0;
  DeterminantBasis basis;

  ActiveSpace() = default;
  ActiveSpace(int n, int na, int nb) : n_orbitals(n), n_alpha(na), n_beta(nb), basis(build_basis(n, na, nb)) {}

  int n_spatial() const noexcept { return n_orbitals / 2; }

  Eigen::VectorXd restrict(const FockVector& v) const {
    Eigen::VectorXd c(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i) c[static_cast<Eigen::Index>(i)] = v[basis.dets[i]];
    return c;
  }
  FockVector embed(const Eigen::VectorXd& c) const {
    FockVector v(n_orbitals);
    for (std::size_t i = 0; i < basis.size(); ++i) v[basis.dets[i]] = c[static_cast<Eigen::Index>(i)];
    return v;
  }
};

/// Sector matrix of the Hamiltonian rotated by b, electronic part only.
inline Eigen::MatrixXd sector_hamiltonian(const MolecularIntegrals& ints, const Eigen::MatrixXd& b,
                                          const ActiveSpace& space) {
  return FciHamiltonian(rotate_integrals(ints, b), space.basis).dense();
}

struct IterationRecord {
  int iteration = 0;
  double energy = 0.0;     ///< electronic
  double objective = 0.0;  ///< energy plus penalties
  double delta_energy = 0.0;
  std::vector<double> overlaps;  ///< squared overlaps with each lower state
  int theta_evaluations = 0;
  int orbital_steps = 0;
};

struct StateSolution {
  int index = 0;  ///< 1-based
  std::vector<double> theta;
  PartialUnitary u;
  FockVector state;  ///< active-space state in the basis of u
  double energy = 0.0;
  double objective = 0.0;
  double initial_energy = std::numeric_limits<double>::quiet_NaN();  ///< iteration zero
  std::vector<IterationRecord> trace;
  std::vector<double> final_overlaps;
  bool converged = false;
  std::vector<std::string> warnings;
};

/// Circuit phase input: sector Hamiltonian and lower states, all in the current basis.
struct ThetaProblem {
  Eigen::MatrixXd h;
  std::vector<Eigen::VectorXd> lower;
  std::vector<double> betas;

  double objective(const Eigen::VectorXd& c) const {
    double f = c.dot(h * c);
    for (std::size_t j = 0; j < lower.size(); ++j) {
      const double o = lower[j].dot(c);
      f += betas[j] * o * o;
    }
    return f;
  }
};

struct ThetaOutcome {
  std::vector<double> theta;
  FockVector state;
  double value = 0.0;
  int evaluations = 0;
  bool budget_exhausted = false;
  std::vector<double> history;
};

class ThetaSolver {
 public:
  virtual ~ThetaSolver() = default;
  virtual ThetaOutcome solve(const ThetaProblem& problem, const ActiveSpace& space,
                             const std::vector<double>& theta0) const = 0;
  virtual std::vector<double> initial_theta() const = 0;
};

/// Derivative-free optimization of the circuit parameters.
class AnsatzThetaSolver : public ThetaSolver {
 public:
  AnsatzThetaSolver(AnsatzCircuit circuit, FockVector reference, ThetaMethod method, MinimizeOptions options)
      : circuit_(std::move(circuit)), ref_(std::move(reference)), method_(method), options_(options) {}

  const AnsatzCircuit& circuit() const noexcept { return circuit_; }
  const FockVector& reference() const noexcept { return ref_; }

  std::vector<double> initial_theta() const override { return std::vector<double>(circuit_.n_params(), 0.0); }

  ThetaOutcome solve(const ThetaProblem& problem, const ActiveSpace& space,
                     const std::vector<double>& theta0) const override {
    const Objective f = [&](std::span<const double> t) {
      return problem.objective(space.restrict(apply_ansatz(circuit_, t, ref_)));
    };
    const MinimizeResult r = minimize(method_, f, theta0, options_);
    ThetaOutcome out;
    out.theta = r.x;
    out.state = apply_ansatz(circuit_, r.x, ref_);
    out.value = r.value;
    out.evaluations = r.evaluations;
    out.budget_exhausted = r.budget_exhausted;
    out.history = r.history;
    return out;
  }

 private:
  AnsatzCircuit circuit_;
  FockVector ref_;
  ThetaMethod method_;
  MinimizeOptions options_;
};

/// Lowest eigenvector of the deflated sector matrix; stands in for a perfect circuit optimizer.
class ExactThetaSolver : public ThetaSolver {
 public:
  std::vector<double> initial_theta() const override { return {}; }

  ThetaOutcome solve(const ThetaProblem& problem, const ActiveSpace& space,
                     const std::vector<double>&) const override {
    Eigen::MatrixXd a = problem.h;
    for (std::size_t j = 0; j < problem.lower.size(); ++j)
      a += problem.betas[j] * problem.lower[j] * problem.lower[j].transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()));
    Eigen::VectorXd c = es.eigenvectors().col(0);
    Eigen::Index big = 0;
    c.cwiseAbs().maxCoeff(&big);
    if (c[big] < 0) c = -c;
    ThetaOutcome out;
    out.state = space.embed(c);
    out.value = problem.objective(c);
    out.evaluations = 1;
    out.history = {out.value};
    return out;
  }
};

/// Lower state re-expressed in the basis of u: U(u^T u_j) psi_j, restricted to the sector.
inline Eigen::VectorXd lower_state_in_basis(const StateSolution& lower, const PartialUnitary& u,
                                            const ActiveSpace& space) {
  return space.restrict(apply_exterior_transform(inter_basis_map(u, lower.u), lower.state));
}

inline ThetaProblem make_theta_problem(const MolecularIntegrals& ints, const PartialUnitary& u,
                                       const std::vector<StateSolution>& lower, const DeflationConfig& deflation,
                                       const ActiveSpace& space) {
  ThetaProblem p;
  p.h = sector_hamiltonian(ints, u.block(), space);
  for (std::size_t j = 0; j < lower.size(); ++j) {
    p.lower.push_back(lower_state_in_basis(lower[j], u, space));
    p.betas.push_back(deflation.beta(j));
  }
  return p;
}

/// Reference evaluation of F_k through RDMs and the exterior-algebra overlap.
inline double vqd_objective(const AnsatzCircuit& circuit, const FockVector& reference, std::span<const double> theta,
                            const PartialUnitary& u, const std::vector<StateSolution>& lower,
                            const DeflationConfig& deflation, const MolecularIntegrals& ints) {
  const FockVector psi = apply_ansatz(circuit, theta, reference);
  double f = rotated_energy(u, measure_rdms(psi), ints);
  for (std::size_t j = 0; j < lower.size(); ++j) {
    const double o = overlap(lower[j].u, u, lower[j].state, psi);
    f += deflation.beta(j) * o * o;
  }
  return f;
}

/// Squared overlaps of psi (basis u) with every lower state.
inline std::vector<double> squared_overlaps(const PartialUnitary& u, const FockVector& psi,
                                            const std::vector<StateSolution>& lower) {
  std::vector<double> out;
  for (const auto& l : lower) {
    const double o = overlap(l.u, u, l.state, psi);
    out.push_back(o * o);
  }
  return out;
}

struct OrbitalPhaseResult {
  PartialUnitary u;
  double objective = 0.0;
  int steps = 0;
  int cycles = 0;
  bool rank_failure = false;
  std::vector<double> energy_history;  ///< energy at each step's starting point
};

/**
 * Projected gradient descent on E(u) + sum_j beta_j O_j(u)^2 at fixed state.
 * Every `inner_steps` steps the overlaps O_j and their gradients are
 * recomputed; in between the gradients stay frozen and O_j follows its
 * first-order model O_j + <grad O_j, b - b0>. Energy gradients are exact at
 * every step.
 */
inline OrbitalPhaseResult optimize_orbitals(const RotatedEnergyModel& model, const SpinSummedRdm& rdm,
                                            const FockVector& psi, const PartialUnitary& u_init,
                                            const std::vector<StateSolution>& lower, const DeflationConfig& deflation,
                                            const OptimizerConfig& cfg) {
  OrbitalPhaseResult res;
  res.u = u_init;
  const double sign = cfg.flip_overlap_sign ? -1.0 : 1.0;
  auto penalty = [&](const PartialUnitary& u) {
    double p = 0.0;
    const auto o = squared_overlaps(u, psi, lower);
    for (std::size_t j = 0; j < o.size(); ++j) p += deflation.beta(j) * o[j];
    return p;
  };
  double f_prev = model.energy(res.u.block(), rdm) + penalty(res.u);
  res.objective = f_prev;
  std::vector<double> o0(lower.size());
  std::vector<Eigen::MatrixXd> dO(lower.size());
  for (int cycle = 0; cycle < cfg.max_orbital_cycles; ++cycle) {
    const Eigen::MatrixXd b0 = res.u.block();
    for (std::size_t j = 0; j < lower.size(); ++j) {
      o0[j] = overlap(lower[j].u, res.u, lower[j].state, psi);
      dO[j] = overlap_value_gradient(lower[j].u, res.u, lower[j].state, psi);
    }
    for (int s = 0; s < cfg.inner_steps; ++s) {
      auto [e, g] = model.energy_and_gradient(res.u.block(), rdm);
      res.energy_history.push_back(e);
      const Eigen::MatrixXd db = res.u.block() - b0;
      for (std::size_t j = 0; j < lower.size(); ++j) {
        const double o = o0[j] + (dO[j].array() * db.array()).sum();
        g += sign * 2.0 * deflation.beta(j) * o * dO[j];
      }
      try {
        res.u = projected_gd_step(res.u, g, cfg.eta);
      } catch (const RankError&) {
        res.rank_failure = true;
        res.objective = model.energy(res.u.block(), rdm) + penalty(res.u);
        return res;
      }
      ++res.steps;
    }
    ++res.cycles;
    const double f = model.energy(res.u.block(), rdm) + penalty(res.u);
    res.objective = f;
    if (std::abs(f_prev - f) < cfg.orbital_tol) break;
    f_prev = f;
  }
  return res;
}

/// Shared setup for one molecule and active space.
struct SolverContext {
  const MolecularIntegrals& ints;
  RotatedEnergyModel model;
  ActiveSpace space;

  SolverContext(const MolecularIntegrals& integrals, int n_active_spin_orbitals, int n_alpha, int n_beta)
      : ints(integrals), model(integrals), space(n_active_spin_orbitals, n_alpha, n_beta) {
    if (n_active_spin_orbitals % 2 != 0 || n_active_spin_orbitals / 2 > integrals.m_spatial)
      throw ConfigError("active space of " + std::to_string(n_active_spin_orbitals) +
                        " spin-orbitals does not fit the integrals");
  }
};

struct StateInit {
  PartialUnitary u;
  std::vector<double> theta;  ///< empty: solver default
};

inline std::unique_ptr<ThetaSolver> make_ansatz_solver(const ActiveSpace& space, const OptimizerConfig& cfg) {
  MinimizeOptions opt;
  opt.max_evaluations = cfg.theta_budget;
  opt.restarts = cfg.theta_restarts;
  opt.seed = cfg.seed;
  return std::make_unique<AnsatzThetaSolver>(build_uccsd(space.n_orbitals, space.n_alpha, space.n_beta, cfg.reps),
                                             hf_reference(space.n_orbitals, space.n_alpha, space.n_beta),
                                             cfg.theta_method, opt);
}

/**
 * One state by alternating circuit and orbital phases until the energy change
 * over a two-step iteration drops below outer_tol. The energy at the initial
 * point counts as iteration zero.
 */
inline StateSolution solve_state_ssvqd(const SolverContext& ctx, int k, const std::vector<StateSolution>& lower,
                                       const StateInit& init, const ThetaSolver& solver, const OptimizerConfig& cfg,
                                       const DeflationConfig& deflation) {
  cfg.validate();
  if (static_cast<int>(lower.size()) != k - 1)
    throw ConfigError("solve_state_ssvqd: state " + std::to_string(k) + " needs " + std::to_string(k - 1) +
                      " lower states");
  if (init.u.m_spatial() != ctx.ints.m_spatial || init.u.n_spatial() != ctx.space.n_spatial())
    throw ShapeError("solve_state_ssvqd: initial u has the wrong shape");
  StateSolution sol;
  sol.index = k;
  sol.u = init.u;
  sol.theta = init.theta.empty() ? solver.initial_theta() : init.theta;

  // Iteration zero: the initial point itself.
  {
    ThetaProblem p = make_theta_problem(ctx.ints, sol.u, lower, deflation, ctx.space);
    if (auto* a = dynamic_cast<const AnsatzThetaSolver*>(&solver))
      sol.state = apply_ansatz(a->circuit(), sol.theta, a->reference());
    else
      sol.state = hf_reference(ctx.space.n_orbitals, ctx.space.n_alpha, ctx.space.n_beta);
    const Eigen::VectorXd c = ctx.space.restrict(sol.state);
    sol.energy = c.dot(p.h * c);
    sol.objective = p.objective(c);
    sol.initial_energy = sol.energy;
  }
  double e_prev = sol.energy;
  for (int it = 1; it <= cfg.max_outer; ++it) {
    const ThetaProblem p = make_theta_problem(ctx.ints, sol.u, lower, deflation, ctx.space);
    ThetaOutcome t = solver.solve(p, ctx.space, sol.theta);
    sol.theta = t.theta;
    sol.state = t.state;

    const SpinSummedRdm rdm = spin_sum(measure_rdms(sol.state));
    OrbitalPhaseResult o = optimize_orbitals(ctx.model, rdm, sol.state, sol.u, lower, deflation, cfg);
    if (o.rank_failure) sol.warnings.push_back("iteration " + std::to_string(it) + ": orthogonalization failed");
    sol.u = o.u;

    IterationRecord rec;
    rec.iteration = it;
    rec.energy = ctx.model.energy(sol.u.block(), rdm);
    rec.overlaps = squared_overlaps(sol.u, sol.state, lower);
    rec.objective = rec.energy;
    for (std::size_t j = 0; j < lower.size(); ++j) rec.objective += deflation.beta(j) * rec.overlaps[j];
    rec.delta_energy = std::abs(rec.energy - e_prev);
    rec.theta_evaluations = t.evaluations;
    rec.orbital_steps = o.steps;
    sol.trace.push_back(rec);
    sol.energy = rec.energy;
    sol.objective = rec.objective;
    e_prev = rec.energy;
    if (rec.delta_energy < cfg.outer_tol) {
      sol.converged = true;
      break;
    }
  }
  sol.final_overlaps = squared_overlaps(sol.u, sol.state, lower);
  for (std::size_t j = 0; j < lower.size(); ++j)
    if (deflation.beta(j) <= sol.energy - lower[j].energy)
      sol.warnings.push_back("beta_" + std::to_string(j + 1) + " does not exceed the gap to state " +
                             std::to_string(k));
  return sol;
}

/// States 1..K in sequence; inits[k-1] applies to state k (missing: padded identity).
inline std::vector<StateSolution> solve_ssvqd(const SolverContext& ctx, int n_states, const std::vector<StateInit>& inits,
                                              const ThetaSolver& solver, const OptimizerConfig& cfg,
                                              const DeflationConfig& deflation) {
  std::vector<StateSolution> out;
  for (int k = 1; k <= n_states; ++k) {
    StateInit init = static_cast<std::size_t>(k - 1) < inits.size()
                         ? inits[static_cast<std::size_t>(k - 1)]
                         : StateInit{PartialUnitary::padded_identity(ctx.ints.m_spatial, ctx.space.n_spatial()), {}};
    out.push_back(solve_state_ssvqd(ctx, k, out, init, solver, cfg, deflation));
  }
  return out;
}

struct SavqdRecord {
  int iteration = 0;
  std::vector<double> energies;
  double weighted = 0.0;
  double delta_weighted = 0.0;
  int orbital_steps = 0;
};

struct SavqdResult {
  std::vector<StateSolution> states;
  PartialUnitary u;
  std::vector<SavqdRecord> trace;
  double weighted = 0.0;
  bool converged = false;
};

/// Projected GD on sum_k w_k E_k(u) with every state frozen, until stationary.
inline OrbitalPhaseResult optimize_shared_orbitals(const RotatedEnergyModel& model, const SpinSummedRdm& weighted_rdm,
                                                   const PartialUnitary& u_init, const OptimizerConfig& cfg) {
  static const std::vector<StateSolution> kNone;
  return optimize_orbitals(model, weighted_rdm, FockVector(), u_init, kNone, DeflationConfig{}, cfg);
}

/**
 * State-averaged scheme: one shared u. Each outer iteration runs a deflation
 * sweep over all K states in the current basis, then minimizes the weighted
 * energy over u from the collected RDMs.
 */
inline SavqdResult solve_savqd(const SolverContext& ctx, int n_states, const PartialUnitary& u_init,
                               const SAWeights& weights, const ThetaSolver& solver, const OptimizerConfig& cfg,
                               const DeflationConfig& deflation) {
  cfg.validate();
  if (weights.w.size() != static_cast<std::size_t>(n_states))
    throw ConfigError("solve_savqd: " + std::to_string(weights.w.size()) + " weights for " + std::to_string(n_states) +
                      " states");
  SavqdResult res;
  res.u = u_init;
  res.states.resize(static_cast<std::size_t>(n_states));
  for (int k = 0; k < n_states; ++k) {
    auto& s = res.states[static_cast<std::size_t>(k)];
    s.index = k + 1;
    s.theta = solver.initial_theta();
  }
  double w_prev = std::numeric_limits<double>::quiet_NaN();
  for (int it = 1; it <= cfg.max_outer; ++it) {
    const Eigen::MatrixXd h = sector_hamiltonian(ctx.ints, res.u.block(), ctx.space);
    std::vector<Eigen::VectorXd> solved;
    std::vector<SpinSummedRdm> rdms;
    int evaluations = 0;
    for (int k = 0; k < n_states; ++k) {
      auto& s = res.states[static_cast<std::size_t>(k)];
      ThetaProblem p;
      p.h = h;
      p.lower = solved;
      for (int j = 0; j < k; ++j) p.betas.push_back(deflation.beta(static_cast<std::size_t>(j)));
      ThetaOutcome t = solver.solve(p, ctx.space, s.theta);
      evaluations += t.evaluations;
      s.theta = t.theta;
      s.state = t.state;
      solved.push_back(ctx.space.restrict(s.state));
      rdms.push_back(spin_sum(measure_rdms(s.state)));
    }
    SpinSummedRdm weighted(ctx.space.n_spatial());
    for (int k = 0; k < n_states; ++k) weighted.add_scaled(rdms[static_cast<std::size_t>(k)], weights.w[static_cast<std::size_t>(k)]);
    OrbitalPhaseResult o = optimize_shared_orbitals(ctx.model, weighted, res.u, cfg);
    res.u = o.u;

    SavqdRecord rec;
    rec.iteration = it;
    rec.orbital_steps = o.steps;
    for (int k = 0; k < n_states; ++k) rec.energies.push_back(ctx.model.energy(res.u.block(), rdms[static_cast<std::size_t>(k)]));
    rec.weighted = weighted_sum_report(rec.energies, weights.w);
    rec.delta_weighted = std::isnan(w_prev) ? std::numeric_limits<double>::infinity() : std::abs(rec.weighted - w_prev);
    res.trace.push_back(rec);
    res.weighted = rec.weighted;
    w_prev = rec.weighted;

    for (int k = 0; k < n_states; ++k) {
      auto& s = res.states[static_cast<std::size_t>(k)];
      s.u = res.u;
      s.energy = rec.energies[static_cast<std::size_t>(k)];
      IterationRecord ir;
      ir.iteration = it;
      ir.energy = s.energy;
      ir.objective = s.energy;
      const auto& tr = s.trace;
      ir.delta_energy = tr.empty() ? std::numeric_limits<double>::infinity() : std::abs(s.energy - tr.back().energy);
      ir.theta_evaluations = evaluations;
      ir.orbital_steps = o.steps;
      for (int j = 0; j < k; ++j) {
        const double ov = solved[static_cast<std::size_t>(j)].dot(solved[static_cast<std::size_t>(k)]);
        ir.overlaps.push_back(ov * ov);
      }
      s.trace.push_back(ir);
      s.final_overlaps = ir.overlaps;
    }
    if (rec.delta_weighted < cfg.outer_tol) {
      res.converged = true;
      break;
    }
  }
  for (auto& s : res.states) s.converged = res.converged;
  return res;
}

}  // namespace ssvqd
