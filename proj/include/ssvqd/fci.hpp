// Copyright 2026 The ssvqd Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file fci.hpp
 * @brief Sector-restricted full configuration interaction.
 *
 * Determinants are stored as alpha | (beta << m_spatial), the same layout the
 * Fock-space vectors use, and ordered ascending so that determinant
 * ib * n_alpha_strings + ia pairs alpha string ia with beta string ib.
 * H is applied in the factorized form
 *
 *   H = e_core + H_alpha (x) 1 + 1 (x) H_beta + sum_{pqrs} (pq|rs) E^a_pq E^b_rs,
 *
 * where the same-spin parts are sparse string-space matrices built from
 * E_pq = a_p^dagger a_q with ascending-order parity.
 */

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "ssvqd/error.hpp"
#include "ssvqd/fockspace.hpp"
#include "ssvqd/hamio.hpp"
#include "ssvqd/partial_unitary.hpp"

namespace ssvqd {

struct DeterminantBasis {
  int n_spin_orbitals = 0;
  int n_alpha = 0;
  int n_beta = 0;
  std::vector<Bits> alpha_strings;  ///< ascending, over m_spatial orbitals
  std::vector<Bits> beta_strings;   ///< ascending
  std::vector<Bits> dets;           ///< ascending, dets[ib * |alpha| + ia]

  int m_spatial() const noexcept { return n_spin_orbitals / 2; }
  std::size_t size() const noexcept { return dets.size(); }

  /// Position of `det` in `dets`, or size() if absent.
  std::size_t index_of(Bits det) const {
    const auto it = std::lower_bound(dets.begin(), dets.end(), det);
    return (it != dets.end() && *it == det) ? static_cast<std::size_t>(it - dets.begin()) : dets.size();
  }
};

inline DeterminantBasis build_basis(int n_spin_orbitals, int n_alpha, int n_beta) {
  if (n_spin_orbitals <= 0 || n_spin_orbitals % 2 != 0 || n_spin_orbitals > 64)
    throw RangeError("build_basis: spin-orbital count must be even and at most 64");
  const int m = n_spin_orbitals / 2;
  if (n_alpha < 0 || n_beta < 0 || n_alpha > m || n_beta > m)
    throw RangeError("build_basis: sector (" + std::to_string(n_alpha) + ", " + std::to_string(n_beta) +
                     ") infeasible with " + std::to_string(m) + " spatial orbitals");
  DeterminantBasis basis;
  basis.n_spin_orbitals = n_spin_orbitals;
  basis.n_alpha = n_alpha;
  basis.n_beta = n_beta;
  basis.alpha_strings = combinations(m, n_alpha);
  basis.beta_strings = combinations(m, n_beta);
  basis.dets.reserve(basis.alpha_strings.size() * basis.beta_strings.size());
  for (Bits b : basis.beta_strings)
    for (Bits a : basis.alpha_strings) basis.dets.push_back(a | (b << m));
  return basis;
}

/// One entry of E_pq |source> = sign |target>.
struct StringExcitation {
  int source;
  int target;
  int pq;  ///< p * m + q
  double sign;
};

/// All non-zero E_pq actions on an ascending string list (p == q included).
inline std::vector<StringExcitation> string_excitations(const std::vector<Bits>& strings, int m) {
  std::vector<StringExcitation> out;
  auto index_of = [&](Bits s) {
    return static_cast<int>(std::lower_bound(strings.begin(), strings.end(), s) - strings.begin());
  };
  for (int s = 0; s < static_cast<int>(strings.size()); ++s) {
    const OccupationIndex occ{strings[static_cast<std::size_t>(s)]};
    for (int q = 0; q < m; ++q) {
      if (!occ.occupied(q)) continue;
      const OccupationIndex removed{occ.bits & ~(Bits{1} << q)};
      const double sq = parity(occ.count_below(q));
      for (int p = 0; p < m; ++p) {
        if (removed.occupied(p)) continue;
        const Bits t = removed.bits | (Bits{1} << p);
        out.push_back({s, index_of(t), p * m + q, sq * parity(removed.count_below(p))});
      }
    }
  }
  return out;
}

/// Hamiltonian of one integral set restricted to one determinant sector.
class FciHamiltonian {
 public:
  FciHamiltonian(const MolecularIntegrals& ints, DeterminantBasis basis) : basis_(std::move(basis)) {
    if (basis_.m_spatial() != ints.m_spatial)
      throw ShapeError("FciHamiltonian: basis has " + std::to_string(basis_.m_spatial()) +
                       " spatial orbitals, integrals have " + std::to_string(ints.m_spatial));
    m_ = ints.m_spatial;
    e_core_ = ints.e_core;
    const std::size_t m2 = static_cast<std::size_t>(m_) * m_;
    v_.assign(ints.v.begin(), ints.v.end());
    alpha_exc_ = string_excitations(basis_.alpha_strings, m_);
    beta_exc_ = string_excitations(basis_.beta_strings, m_);

    // k_pq = h_pq - 1/2 sum_r (pr|rq)
    Eigen::MatrixXd k = ints.h;
    for (int p = 0; p < m_; ++p)
      for (int q = 0; q < m_; ++q)
        for (int r = 0; r < m_; ++r) k(p, q) -= 0.5 * ints.eri(p, r, r, q);
    h_alpha_ = same_spin_matrix(basis_.alpha_strings.size(), alpha_exc_, k, m2);
    h_beta_ = same_spin_matrix(basis_.beta_strings.size(), beta_exc_, k, m2);
    build_diagonal();
  }

  const DeterminantBasis& basis() const noexcept { return basis_; }
  std::size_t size() const noexcept { return basis_.size(); }
  double e_core() const noexcept { return e_core_; }
  const Eigen::VectorXd& diagonal() const noexcept { return diag_; }

  /// y = H x, including e_core * x.
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    if (static_cast<std::size_t>(x.size()) != size())
      throw ShapeError("hamiltonian_matvec: vector length " + std::to_string(x.size()) + " vs basis size " +
                       std::to_string(size()));
    const Eigen::Index na = static_cast<Eigen::Index>(basis_.alpha_strings.size());
    const Eigen::Index nb = static_cast<Eigen::Index>(basis_.beta_strings.size());
    Eigen::VectorXd y = e_core_ * x;
    Eigen::Map<const Eigen::MatrixXd> X(x.data(), na, nb);
    Eigen::Map<Eigen::MatrixXd> Y(y.data(), na, nb);
    Y += h_alpha_ * X;
    Y += (h_beta_ * X.transpose()).transpose();

    const std::size_t m2 = static_cast<std::size_t>(m_) * m_;
    const double* xd = x.data();
    double* yd = y.data();
    for (const auto& ea : alpha_exc_) {
      const double* vrow = v_.data() + static_cast<std::size_t>(ea.pq) * m2;
      for (const auto& eb : beta_exc_) {
        const double xv = xd[static_cast<std::size_t>(eb.source) * na + ea.source];
        if (xv == 0.0) continue;
        yd[static_cast<std::size_t>(eb.target) * na + ea.target] += ea.sign * eb.sign * vrow[eb.pq] * xv;
      }
    }
    return y;
  }

  /// Dense matrix assembled column by column from apply().
  Eigen::MatrixXd dense() const {
    const Eigen::Index n = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd h(n, n);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    for (Eigen::Index c = 0; c < n; ++c) {
      e[c] = 1.0;
      h.col(c) = apply(e);
      e[c] = 0.0;
    }
    return h;
  }

 private:
  Eigen::SparseMatrix<double> same_spin_matrix(std::size_t n_strings, const std::vector<StringExcitation>& exc,
                                               const Eigen::MatrixXd& k, std::size_t m2) const {
    // Group excitations by source string.
    std::vector<std::vector<const StringExcitation*>> by_source(n_strings);
    for (const auto& e : exc) by_source[static_cast<std::size_t>(e.source)].push_back(&e);
    std::vector<Eigen::Triplet<double>> triplets;
    std::vector<double> acc(n_strings, 0.0);
    std::vector<int> touched;
    for (std::size_t s = 0; s < n_strings; ++s) {
      auto add = [&](int t, double val) {
        if (acc[static_cast<std::size_t>(t)] == 0.0) touched.push_back(t);
        acc[static_cast<std::size_t>(t)] += val;
      };
      for (const auto* e1 : by_source[s]) {
        add(e1->target, e1->sign * k(e1->pq / m_, e1->pq % m_));
        for (const auto* e2 : by_source[static_cast<std::size_t>(e1->target)]) {
          add(e2->target, 0.5 * e1->sign * e2->sign * v_[static_cast<std::size_t>(e2->pq) * m2 + e1->pq]);
        }
      }
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
      for (int t : touched) {
        if (acc[static_cast<std::size_t>(t)] != 0.0)
          triplets.emplace_back(t, static_cast<int>(s), acc[static_cast<std::size_t>(t)]);
        acc[static_cast<std::size_t>(t)] = 0.0;
      }
      touched.clear();
    }
    Eigen::SparseMatrix<double> mat(static_cast<Eigen::Index>(n_strings), static_cast<Eigen::Index>(n_strings));
    mat.setFromTriplets(triplets.begin(), triplets.end());
    return mat;
  }

  void build_diagonal() {
    const std::size_t na = basis_.alpha_strings.size();
    const std::size_t nb = basis_.beta_strings.size();
    diag_.resize(static_cast<Eigen::Index>(size()));
    auto occupied = [&](Bits s) {
      std::vector<int> o;
      for (; s; s &= s - 1) o.push_back(std::countr_zero(s));
      return o;
    };
    auto eri = [&](int i, int j, int k, int l) {
      return v_[((static_cast<std::size_t>(i) * m_ + j) * m_ + k) * m_ + l];
    };
    for (std::size_t ib = 0; ib < nb; ++ib) {
      const auto ob = occupied(basis_.beta_strings[ib]);
      for (std::size_t ia = 0; ia < na; ++ia) {
        const auto oa = occupied(basis_.alpha_strings[ia]);
        double e = e_core_ + h_alpha_.coeff(static_cast<Eigen::Index>(ia), static_cast<Eigen::Index>(ia)) +
                   h_beta_.coeff(static_cast<Eigen::Index>(ib), static_cast<Eigen::Index>(ib));
        for (int i : oa)
          for (int j : ob) e += eri(i, i, j, j);
        diag_[static_cast<Eigen::Index>(ib * na + ia)] = e;
      }
    }
  }

  DeterminantBasis basis_;
  int m_ = 0;
  double e_core_ = 0.0;
  std::vector<double> v_;
  std::vector<StringExcitation> alpha_exc_;
  std::vector<StringExcitation> beta_exc_;
  Eigen::SparseMatrix<double> h_alpha_;
  Eigen::SparseMatrix<double> h_beta_;
  Eigen::VectorXd diag_;
};

inline Eigen::VectorXd hamiltonian_matvec(const MolecularIntegrals& ints, const DeterminantBasis& basis,
                                          const Eigen::VectorXd& x) {
  return FciHamiltonian(ints, basis).apply(x);
}

struct EigenResult {
  Eigen::VectorXd energies;  ///< ascending, include e_core
  Eigen::MatrixXd vectors;   ///< one orthonormal column per root
  std::vector<double> residual_norms;
  int iterations = 0;
  double e_core = 0.0;

  double electronic(Eigen::Index i) const { return energies[i] - e_core; }
};

struct DavidsonOptions {
  double tol = 1e-8;
  int max_iterations = 500;
  int restart_factor = 8;  ///< subspace collapses once it exceeds restart_factor * k
  double degeneracy_tol = 1e-6;
};

namespace detail {

// Rotate each cluster of (numerically) degenerate roots so that the roots
// diagonalize the orbital-weighted occupation sum_p (p + 1) n_p, then order
// by the index of the largest-magnitude determinant and make that amplitude
// positive.
inline void canonicalize_roots(const DeterminantBasis& basis, Eigen::VectorXd& energies, Eigen::MatrixXd& vectors,
                               double degeneracy_tol) {
  const Eigen::Index k = energies.size();
  const int m = basis.m_spatial();
  Eigen::VectorXd weight(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t d = 0; d < basis.size(); ++d) {
    double w = 0.0;
    for (int p = 0; p < 2 * m; ++p)
      if ((basis.dets[d] >> p) & 1) w += (p % m) + 1;
    weight[static_cast<Eigen::Index>(d)] = w;
  }
  auto leading_index = [&](const Eigen::VectorXd& x) {
    const double big = x.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (std::abs(x[i]) >= big * (1.0 - 1e-6)) return i;
    return Eigen::Index{0};
  };
  Eigen::Index start = 0;
  while (start < k) {
    Eigen::Index end = start + 1;
    while (end < k && energies[end] - energies[end - 1] < degeneracy_tol) ++end;
    const Eigen::Index size = end - start;
    if (size > 1) {
      Eigen::MatrixXd block = vectors.middleCols(start, size);
      Eigen::MatrixXd w = block.transpose() * weight.asDiagonal() * block;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (w + w.transpose()));
      block = block * es.eigenvectors();
      std::vector<Eigen::Index> order(static_cast<std::size_t>(size));
      std::iota(order.begin(), order.end(), 0);
      std::vector<Eigen::Index> lead(static_cast<std::size_t>(size));
      for (Eigen::Index c = 0; c < size; ++c) lead[static_cast<std::size_t>(c)] = leading_index(block.col(c));
      std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return lead[static_cast<std::size_t>(a)] < lead[static_cast<std::size_t>(b)];
      });
      for (Eigen::Index c = 0; c < size; ++c) vectors.col(start + c) = block.col(order[static_cast<std::size_t>(c)]);
    }
    start = end;
  }
  for (Eigen::Index c = 0; c < k; ++c) {
    const Eigen::Index i = leading_index(vectors.col(c));
    if (vectors(i, c) < 0) vectors.col(c) *= -1.0;
  }
}

}  // namespace detail

/**
 * Lowest k eigenpairs by block Davidson with diagonal preconditioning.
 * Start vectors are unit vectors on the 2k lowest-diagonal determinants
 * (extended over exact diagonal ties at the boundary).
 */
inline EigenResult lowest_eigenpairs(const FciHamiltonian& ham, int k, const DavidsonOptions& opt = {}) {
  const Eigen::Index n = static_cast<Eigen::Index>(ham.size());
  if (k <= 0 || k > n)
    throw RangeError("lowest_eigenpairs: requested " + std::to_string(k) + " roots from a basis of " +
                     std::to_string(n));
  const Eigen::VectorXd& diag = ham.diagonal();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return diag[a] < diag[b]; });
  // Twice as many guesses as roots, extended over diagonal ties, so that
  // roots of every symmetry class are represented in the initial subspace.
  Eigen::Index n_start = std::min<Eigen::Index>(n, 2 * k);
  while (n_start < n &&
         std::abs(diag[order[static_cast<std::size_t>(n_start)]] - diag[order[static_cast<std::size_t>(n_start - 1)]]) < 1e-12)
    ++n_start;

  const Eigen::Index max_dim = std::min<Eigen::Index>(n, std::max<Eigen::Index>(opt.restart_factor * k, 2 * n_start));
  Eigen::MatrixXd V(n, max_dim + k);
  Eigen::MatrixXd AV(n, max_dim + k);
  Eigen::Index dim = 0;
  auto add_vector = [&](Eigen::VectorXd t) {
    for (int pass = 0; pass < 2; ++pass)
      if (dim > 0) t -= V.leftCols(dim) * (V.leftCols(dim).transpose() * t);
    const double norm = t.norm();
    if (norm < 1e-10) return false;
    V.col(dim) = t / norm;
    AV.col(dim) = ham.apply(V.col(dim));
    ++dim;
    return true;
  };
  for (Eigen::Index i = 0; i < n_start; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[order[static_cast<std::size_t>(i)]] = 1.0;
    add_vector(e);
  }

  EigenResult result;
  result.e_core = ham.e_core();
  std::vector<double> residuals(static_cast<std::size_t>(k), 0.0);
  for (int iter = 1; iter <= opt.max_iterations; ++iter) {
    Eigen::MatrixXd g = V.leftCols(dim).transpose() * AV.leftCols(dim);
    g = 0.5 * (g + g.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    const Eigen::MatrixXd y = es.eigenvectors().leftCols(k);
    const Eigen::VectorXd theta = es.eigenvalues().head(k);
    Eigen::MatrixXd X = V.leftCols(dim) * y;
    Eigen::MatrixXd AX = AV.leftCols(dim) * y;
    Eigen::MatrixXd R = AX - X * theta.asDiagonal();
    bool converged = true;
    for (Eigen::Index c = 0; c < k; ++c) {
      residuals[static_cast<std::size_t>(c)] = R.col(c).norm();
      if (residuals[static_cast<std::size_t>(c)] >= opt.tol) converged = false;
    }
    if (converged) {
      result.energies = theta;
      result.vectors = X;
      result.residual_norms = residuals;
      result.iterations = iter;
      detail::canonicalize_roots(ham.basis(), result.energies, result.vectors, opt.degeneracy_tol);
      return result;
    }
    if (dim + k > max_dim) {
      // Collapse onto the lowest 2k Ritz vectors (already orthonormal).
      const Eigen::Index keep = std::min<Eigen::Index>(dim, 2 * k);
      const Eigen::MatrixXd yk = es.eigenvectors().leftCols(keep);
      const Eigen::MatrixXd vk = V.leftCols(dim) * yk;
      const Eigen::MatrixXd avk = AV.leftCols(dim) * yk;
      V.leftCols(keep) = vk;
      AV.leftCols(keep) = avk;
      dim = keep;
    }
    bool added = false;
    for (Eigen::Index c = 0; c < k; ++c) {
      if (residuals[static_cast<std::size_t>(c)] < opt.tol) continue;
      Eigen::VectorXd t(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        double denom = theta[c] - diag[i];
        if (std::abs(denom) < 1e-8) denom = denom < 0 ? -1e-8 : 1e-8;
        t[i] = R(i, c) / denom;
      }
      added = add_vector(std::move(t)) || added;
    }
    if (!added) {
      for (Eigen::Index c = 0; c < k && dim < n; ++c)
        if (residuals[static_cast<std::size_t>(c)] >= opt.tol) added = add_vector(R.col(c)) || added;
      if (!added) break;
    }
  }
  throw ConvergenceError("lowest_eigenpairs: Davidson did not converge", residuals);
}

inline EigenResult lowest_eigenpairs(const MolecularIntegrals& ints, const DeterminantBasis& basis, int k,
                                     double tol = 1e-8) {
  DavidsonOptions opt;
  opt.tol = tol;
  return lowest_eigenpairs(FciHamiltonian(ints, basis), k, opt);
}

/// <fci_vec| U(u) |psi>, embedding the active-space state psi into the full space.
inline double fci_overlap_with_active(const Eigen::VectorXd& fci_vec, const DeterminantBasis& basis,
                                      const PartialUnitary& u, const FockVector& psi) {
  if (static_cast<std::size_t>(fci_vec.size()) != basis.size())
    throw ShapeError("fci_overlap_with_active: FCI vector does not match the basis");
  if (u.m_spatial() != basis.m_spatial() || psi.n_orbitals() != 2 * u.n_spatial())
    throw ShapeError("fci_overlap_with_active: u does not map the active space into the basis orbitals");
  if (!in_sector(psi, basis.n_alpha, basis.n_beta, 1e-14))
    throw ShapeError("fci_overlap_with_active: psi is not in the basis sector");
  return fci_vec.dot(apply_exterior_transform_onto(u.spin_form(), psi, basis.dets));
}

}  // namespace ssvqd
