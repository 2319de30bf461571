// Copyright 2026 The ssvqd Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file checks.hpp
 * @brief Randomized self-checks: analytic gradients against central finite
 * differences, exterior-algebra identities, and the deflation oracle.
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ssvqd/drivers.hpp"
#include "ssvqd/fockspace.hpp"
#include "ssvqd/hamio.hpp"
#include "ssvqd/orbopt.hpp"
#include "ssvqd/partial_unitary.hpp"

namespace ssvqd {

struct CheckResult {
  std::string name;
  int instances = 0;
  double worst = 0.0;  ///< largest error seen
  double tolerance = 0.0;
  bool passed() const { return instances > 0 && worst < tolerance; }
};

using CheckReport = std::vector<CheckResult>;

inline bool all_passed(const CheckReport& r) {
  return std::all_of(r.begin(), r.end(), [](const CheckResult& c) { return c.passed(); });
}

/// Random symmetric h and 8-fold symmetric v, Gaussian entries.
template <class Rng>
MolecularIntegrals random_integrals(int m, int nelec, Rng& rng, double h_scale = 1.0, double v_scale = 0.25) {
  std::normal_distribution<double> gauss;
  MolecularIntegrals ints(m, nelec, 0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= i; ++j) ints.h(i, j) = ints.h(j, i) = h_scale * gauss(rng);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= i; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l <= k; ++l)
          if (i * (i + 1) / 2 + j >= k * (k + 1) / 2 + l) ints.set_eri(i, j, k, l, v_scale * gauss(rng));
  return ints;
}

/// Random normalized state supported on one (n_alpha, n_beta) sector.
template <class Rng>
FockVector random_sector_state(int n_orbitals, int n_alpha, int n_beta, Rng& rng) {
  std::normal_distribution<double> gauss;
  FockVector v(n_orbitals);
  for (Bits s : sector_states(n_orbitals, n_alpha, n_beta)) v[s] = gauss(rng);
  v.normalize();
  return v;
}

/// Random vector over all 2^N basis states (mixed particle numbers).
template <class Rng>
FockVector random_fock_vector(int n_orbitals, Rng& rng) {
  std::normal_distribution<double> gauss;
  FockVector v(n_orbitals);
  for (auto& a : v.amplitudes()) a = gauss(rng);
  return v;
}

template <class Rng>
Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = gauss(rng);
  return a;
}

/// Central differences of a scalar function of a matrix, entry by entry.
inline Eigen::MatrixXd central_difference(const std::function<double(const Eigen::MatrixXd&)>& f,
                                          const Eigen::MatrixXd& x, double step) {
  Eigen::MatrixXd g(x.rows(), x.cols());
  Eigen::MatrixXd y = x;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      y(i, j) = x(i, j) + step;
      const double fp = f(y);
      y(i, j) = x(i, j) - step;
      const double fm = f(y);
      y(i, j) = x(i, j);
      g(i, j) = (fp - fm) / (2.0 * step);
    }
  return g;
}

inline double relative_error(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& reference) {
  return (analytic - reference).norm() / std::max(reference.norm(), 1e-300);
}

struct GradientSuiteOptions {
  int instances = 100;
  int m_spatial = 6;
  int n_spatial = 3;
  int n_alpha = 1;
  int n_beta = 1;
  double step = 1e-5;
  double tolerance = 1e-6;
};

/**
 * rotated_energy_gradient and overlap_gradient against central differences
 * on random (u, state, integrals), plus the operator derivative identity
 * dU(m)[dm] = sum_ij dm_ij a_i^dagger U(m) a_j.
 */
inline CheckReport gradient_suite(std::uint64_t seed, const GradientSuiteOptions& opt = {}) {
  std::mt19937_64 rng(seed);
  const int n_orb = 2 * opt.n_spatial;
  CheckResult energy{"rotated_energy_gradient vs central differences", 0, 0.0, opt.tolerance};
  CheckResult ovl{"overlap_gradient vs central differences", 0, 0.0, opt.tolerance};
  CheckResult ident{"operator derivative identity", 0, 0.0, opt.tolerance};
  for (int t = 0; t < opt.instances; ++t) {
    const MolecularIntegrals ints = random_integrals(opt.m_spatial, opt.n_alpha + opt.n_beta, rng);
    const RotatedEnergyModel model(ints);
    const PartialUnitary u = PartialUnitary::random(opt.m_spatial, opt.n_spatial, rng);
    const FockVector psi = random_sector_state(n_orb, opt.n_alpha, opt.n_beta, rng);
    const SpinSummedRdm rdm = spin_sum(measure_rdms(psi));
    const Eigen::MatrixXd g = model.gradient(u.block(), rdm);
    const Eigen::MatrixXd fd =
        central_difference([&](const Eigen::MatrixXd& b) { return model.energy(b, rdm); }, u.block(), opt.step);
    energy.worst = std::max(energy.worst, relative_error(g, fd));
    ++energy.instances;

    const PartialUnitary uj = PartialUnitary::random(opt.m_spatial, opt.n_spatial, rng);
    const FockVector psi_j = random_sector_state(n_orb, opt.n_alpha, opt.n_beta, rng);
    const Eigen::MatrixXd go = overlap_gradient(uj, u, psi_j, psi);
    const Eigen::MatrixXd fdo = central_difference(
        [&](const Eigen::MatrixXd& b) {
          const double o = overlap(uj, PartialUnitary(b), psi_j, psi);
          return o * o;
        },
        u.block(), opt.step);
    ovl.worst = std::max(ovl.worst, relative_error(go, fdo));
    ++ovl.instances;

    // Identity on a non-square map between different orbital counts.
    const int n_out = n_orb + 1;
    const Eigen::MatrixXd m = random_matrix(n_out, n_orb, rng);
    const Eigen::MatrixXd dm = random_matrix(n_out, n_orb, rng);
    const FockVector v = random_sector_state(n_orb, opt.n_alpha, opt.n_beta, rng);
    const FockVector w = random_fock_vector(n_out, rng);
    const Eigen::MatrixXd tm = transition_matrix(w, m, v);
    const double analytic = (tm.array() * dm.array()).sum();
    const double fp = w.dot(apply_exterior_transform(m + opt.step * dm, v));
    const double fm = w.dot(apply_exterior_transform(m - opt.step * dm, v));
    const double numeric = (fp - fm) / (2.0 * opt.step);
    ident.worst = std::max(ident.worst, std::abs(analytic - numeric) / std::max(std::abs(numeric), 1e-300));
    ++ident.instances;
  }
  return {energy, ovl, ident};
}

/// <J| U(m) |I> by expanding the wedge of mapped columns term by term.
inline FockVector exterior_transform_by_expansion(const LinearOrbitalMap& m, const FockVector& v) {
  const int n_in = static_cast<int>(m.cols());
  const int n_out = static_cast<int>(m.rows());
  FockVector out(n_out);
  const auto& a = v.amplitudes();
  for (Eigen::Index s = 0; s < a.size(); ++s) {
    if (a[s] == 0.0) continue;
    std::vector<int> cols;
    for (int i = 0; i < n_in; ++i)
      if ((static_cast<Bits>(s) >> i) & 1) cols.push_back(i);
    const int k = static_cast<int>(cols.size());
    std::vector<int> rows(static_cast<std::size_t>(k), 0);
    // Every k-tuple of output orbitals.
    while (true) {
      double coeff = a[s];
      for (int x = 0; x < k; ++x) coeff *= m(rows[static_cast<std::size_t>(x)], cols[static_cast<std::size_t>(x)]);
      std::vector<int> sorted = rows;
      bool repeated = false;
      int inversions = 0;
      for (int x = 0; x < k; ++x)
        for (int y = x + 1; y < k; ++y) {
          if (sorted[static_cast<std::size_t>(x)] == sorted[static_cast<std::size_t>(y)]) repeated = true;
          if (sorted[static_cast<std::size_t>(x)] > sorted[static_cast<std::size_t>(y)]) ++inversions;
        }
      if (!repeated && coeff != 0.0) {
        Bits target = 0;
        for (int r : rows) target |= Bits{1} << r;
        out[target] += (inversions % 2 ? -1.0 : 1.0) * coeff;
      }
      int pos = k - 1;
      while (pos >= 0 && rows[static_cast<std::size_t>(pos)] == n_out - 1) rows[static_cast<std::size_t>(pos--)] = 0;
      if (pos < 0) break;
      ++rows[static_cast<std::size_t>(pos)];
    }
  }
  return out;
}

struct ExteriorSuiteOptions {
  int max_orbitals = 6;
  int random_maps = 200;
  int max_particles = 3;
  double tolerance = 1e-12;
};

/**
 * Canonical anticommutation relations (exhaustive over basis states),
 * functoriality U(AB) = U(A) U(B), minor-determinant matrix elements against
 * the expanded wedge product, and active-space overlap against the overlap of
 * both states embedded in the full orbital space.
 */
inline CheckReport exterior_suite(std::uint64_t seed, const ExteriorSuiteOptions& opt = {}) {
  std::mt19937_64 rng(seed);
  CheckResult car{"canonical anticommutation relations", 0, 0.0, opt.tolerance};
  for (int n = 1; n <= opt.max_orbitals; ++n) {
    for (Bits s = 0; s < (Bits{1} << n); ++s) {
      const FockVector e = FockVector::basis_state(n, s);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          FockVector aa = apply_annihilator(i, apply_annihilator(j, e));
          aa += apply_annihilator(j, apply_annihilator(i, e));
          FockVector cc = apply_creator(i, apply_creator(j, e));
          cc += apply_creator(j, apply_creator(i, e));
          FockVector ac = apply_annihilator(i, apply_creator(j, e));
          ac += apply_creator(j, apply_annihilator(i, e));
          if (i == j) {
            FockVector minus = e;
            minus *= -1.0;
            ac += minus;
          }
          car.worst = std::max({car.worst, aa.norm(), cc.norm(), ac.norm()});
          ++car.instances;
        }
    }
  }

  CheckResult functor{"U(AB) = U(A) U(B)", 0, 0.0, opt.tolerance};
  CheckResult minors{"minor determinants vs wedge expansion", 0, 0.0, opt.tolerance};
  std::uniform_int_distribution<int> pick_n(1, opt.max_orbitals);
  for (int t = 0; t < opt.random_maps; ++t) {
    const int n = pick_n(rng);
    const Eigen::MatrixXd a = random_matrix(n, n, rng);
    const Eigen::MatrixXd b = random_matrix(n, n, rng);
    const FockVector v = random_fock_vector(n, rng);
    FockVector lhs = apply_exterior_transform(a * b, v);
    const FockVector rhs = apply_exterior_transform(a, apply_exterior_transform(b, v));
    const double scale = std::max(1.0, rhs.norm());
    FockVector diff = rhs;
    diff *= -1.0;
    lhs += diff;
    functor.worst = std::max(functor.worst, lhs.norm() / scale);
    ++functor.instances;

    const int n_out = pick_n(rng);
    const Eigen::MatrixXd m = random_matrix(n_out, n, rng);
    for (int k = 0; k <= std::min(opt.max_particles, n); ++k) {
      for (Bits cols : combinations(n, k)) {
        const FockVector e = FockVector::basis_state(n, cols);
        const FockVector expanded = exterior_transform_by_expansion(m, e);
        const FockVector fast = apply_exterior_transform(m, e);
        for (Bits rows : combinations(n_out, k)) {
          const double x = exterior_matrix_element(m, rows, cols);
          const double y = expanded[rows];
          const double z = fast[rows];
          const double err = std::max(std::abs(x - y), std::abs(z - y)) / std::max(1.0, std::abs(y));
          minors.worst = std::max(minors.worst, err);
          ++minors.instances;
        }
      }
    }
  }

  CheckResult embed{"active-space overlap vs full-space embedding", 0, 0.0, opt.tolerance};
  for (int t = 0; t < opt.random_maps; ++t) {
    const int m_spatial = 5;
    const int n_spatial = 3;
    const PartialUnitary uj = PartialUnitary::random(m_spatial, n_spatial, rng);
    const PartialUnitary uk = PartialUnitary::random(m_spatial, n_spatial, rng);
    const FockVector pj = random_sector_state(2 * n_spatial, 2, 1, rng);
    const FockVector pk = random_sector_state(2 * n_spatial, 2, 1, rng);
    const double active = overlap(uj, uk, pj, pk);
    const double full = apply_exterior_transform(uj.spin_form(), pj).dot(apply_exterior_transform(uk.spin_form(), pk));
    embed.worst = std::max(embed.worst, std::abs(active - full));
    ++embed.instances;
  }
  return {car, functor, minors, embed};
}

struct DeflationOracleOptions {
  int instances = 20;
  int m_spatial = 4;
  int n_alpha = 2;
  int n_beta = 2;
  int n_states = 3;
  double tolerance = 1e-6;
};

/**
 * The state-specific solver with exact circuit optimization must reproduce
 * the lowest sector eigenvalues of random Hamiltonians in order.
 */
inline CheckReport deflation_oracle(std::uint64_t seed, const DeflationOracleOptions& opt = {}) {
  std::mt19937_64 rng(seed);
  CheckResult res{"deflated SSVQD vs dense diagonalization", 0, 0.0, opt.tolerance};
  CheckResult order{"deflated roots ascending", 0, 0.0, 0.5};
  OptimizerConfig cfg;
  cfg.outer_tol = 1e-10;
  cfg.max_outer = 20;
  cfg.orbital_tol = 1e-12;
  cfg.max_orbital_cycles = 20;
  const ExactThetaSolver solver;
  const DeflationConfig deflation;
  for (int t = 0; t < opt.instances; ++t) {
    const MolecularIntegrals ints = random_integrals(opt.m_spatial, opt.n_alpha + opt.n_beta, rng, 0.5, 0.1);
    const SolverContext ctx(ints, 2 * opt.m_spatial, opt.n_alpha, opt.n_beta);
    Eigen::MatrixXd h = sector_hamiltonian(ints, Eigen::MatrixXd::Identity(opt.m_spatial, opt.m_spatial), ctx.space);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const std::vector<StateSolution> sols = solve_ssvqd(ctx, opt.n_states, {}, solver, cfg, deflation);
    for (int k = 0; k < opt.n_states; ++k) {
      res.worst = std::max(res.worst, std::abs(sols[static_cast<std::size_t>(k)].energy - es.eigenvalues()[k]));
      ++res.instances;
      if (k > 0 && sols[static_cast<std::size_t>(k)].energy < sols[static_cast<std::size_t>(k - 1)].energy - opt.tolerance)
        order.worst = 1.0;
    }
    ++order.instances;
  }
  return {res, order};
}

}  // namespace ssvqd
