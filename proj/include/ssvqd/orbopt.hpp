// Copyright 2026 The ssvqd Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file orbopt.hpp
 * @brief Energy and overlap as explicit functions of the orbital rotation.
 *
 * For an active state psi over N = 2n spin-orbitals and a rotation u with
 * spatial block b (m x n), the rotated energy is
 *
 *   E(b) = sum_pq (b^T h b)_pq gamma_pq + 1/2 sum_ijkl (b b b b . v)_ijkl D_ijkl
 *
 * with gamma the spin-summed 1-RDM and D_ijkl = sum_st <a+_is a+_kt a_lt a_js>
 * the spin-summed 2-RDM in chemist order. Both contractions share the
 * three-quarter transformed tensor W_ajkl = sum_bcd v_abcd b_bj b_ck b_dl.
 */

#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "ssvqd/error.hpp"
#include "ssvqd/fockspace.hpp"
#include "ssvqd/hamio.hpp"
#include "ssvqd/partial_unitary.hpp"

namespace ssvqd {

/// Spin-orbital RDMs. two_body(p,q,r,s) = <a+_p a+_q a_s a_r>.
struct RDMPair {
  int n_orbitals = 0;
  Eigen::MatrixXd one_body;
  std::vector<double> two_body;

  std::size_t index(int p, int q, int r, int s) const noexcept {
    const std::size_t n = static_cast<std::size_t>(n_orbitals);
    return ((static_cast<std::size_t>(p) * n + q) * n + r) * n + s;
  }
  double two(int p, int q, int r, int s) const noexcept { return two_body[index(p, q, r, s)]; }
};

inline RDMPair measure_rdms(const FockVector& psi) {
  const int n = psi.n_orbitals();
  const Eigen::Index dim = static_cast<Eigen::Index>(psi.dimension());
  RDMPair out;
  out.n_orbitals = n;

  Eigen::MatrixXd single(dim, n);
  for (int q = 0; q < n; ++q) single.col(q) = apply_annihilator(q, psi).amplitudes();
  out.one_body = single.transpose() * single;

  // phi_rs = a_s a_r psi for r < s.
  const int n_pairs = n * (n - 1) / 2;
  Eigen::MatrixXd phi(dim, n_pairs);
  std::vector<std::array<int, 2>> pair_of;
  for (int r = 0; r < n; ++r) {
    const FockVector ar = apply_annihilator(r, psi);
    for (int s = r + 1; s < n; ++s) {
      phi.col(static_cast<Eigen::Index>(pair_of.size())) = apply_annihilator(s, ar).amplitudes();
      pair_of.push_back({r, s});
    }
  }
  const Eigen::MatrixXd gram = phi.transpose() * phi;
  out.two_body.assign(static_cast<std::size_t>(n) * n * n * n, 0.0);
  for (int x = 0; x < n_pairs; ++x) {
    const auto [p, q] = pair_of[static_cast<std::size_t>(x)];
    for (int y = 0; y < n_pairs; ++y) {
      const auto [r, s] = pair_of[static_cast<std::size_t>(y)];
      const double g = gram(x, y);
      out.two_body[out.index(p, q, r, s)] = g;
      out.two_body[out.index(q, p, r, s)] = -g;
      out.two_body[out.index(p, q, s, r)] = -g;
      out.two_body[out.index(q, p, s, r)] = g;
    }
  }
  return out;
}

/// Spatial, spin-summed RDMs over n = N/2 active orbitals, chemist-ordered D.
struct SpinSummedRdm {
  int n_spatial = 0;
  Eigen::MatrixXd gamma;
  std::vector<double> d;  ///< n^4, index ((i*n + j)*n + k)*n + l

  SpinSummedRdm() = default;
  explicit SpinSummedRdm(int n)
      : n_spatial(n), gamma(Eigen::MatrixXd::Zero(n, n)), d(static_cast<std::size_t>(n) * n * n * n, 0.0) {}

  std::size_t index(int i, int j, int k, int l) const noexcept {
    const std::size_t n = static_cast<std::size_t>(n_spatial);
    return ((static_cast<std::size_t>(i) * n + j) * n + k) * n + l;
  }

  SpinSummedRdm& add_scaled(const SpinSummedRdm& o, double w) {
    if (o.n_spatial != n_spatial) throw ShapeError("SpinSummedRdm: size mismatch");
    gamma += w * o.gamma;
    for (std::size_t x = 0; x < d.size(); ++x) d[x] += w * o.d[x];
    return *this;
  }
};

/// Fold spin and symmetrize D over the 8-fold index group.
inline SpinSummedRdm spin_sum(const RDMPair& rdms) {
  if (rdms.n_orbitals % 2 != 0) throw ShapeError("spin_sum: odd spin-orbital count");
  const int n = rdms.n_orbitals / 2;
  SpinSummedRdm out(n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      out.gamma(p, q) = 0.5 * (rdms.one_body(p, q) + rdms.one_body(q, p) + rdms.one_body(p + n, q + n) +
                               rdms.one_body(q + n, p + n));
  std::vector<double> raw(out.d.size(), 0.0);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          double g = 0.0;
          for (int sp = 0; sp < 2; ++sp)
            for (int tp = 0; tp < 2; ++tp) g += rdms.two(p + sp * n, q + tp * n, r + sp * n, s + tp * n);
          raw[out.index(p, r, q, s)] = g;
        }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          out.d[out.index(i, j, k, l)] =
              0.125 * (raw[out.index(i, j, k, l)] + raw[out.index(j, i, k, l)] + raw[out.index(i, j, l, k)] +
                       raw[out.index(j, i, l, k)] + raw[out.index(k, l, i, j)] + raw[out.index(l, k, i, j)] +
                       raw[out.index(k, l, j, i)] + raw[out.index(l, k, j, i)]);
  return out;
}

/// h and v transformed by the spatial block b; e_core is dropped.
inline MolecularIntegrals rotate_integrals(const MolecularIntegrals& ints, const Eigen::MatrixXd& b);

/**
 * Integrals prepared once for repeated energy/gradient evaluation at
 * varying b. Holds v as an m^3 x m row-major matrix for the transforms.
 */
class RotatedEnergyModel {
 public:
  explicit RotatedEnergyModel(const MolecularIntegrals& ints)
      : m_(ints.m_spatial), h_(ints.h), v_(Eigen::Map<const RowMatrix>(ints.v.data(), cube(ints.m_spatial), ints.m_spatial)) {}

  int m_spatial() const noexcept { return m_; }
  const Eigen::MatrixXd& h() const noexcept { return h_; }

  /// W_ajkl stored as an m x n^3 matrix (row a, column (j*n + k)*n + l).
  Eigen::MatrixXd three_quarter(const Eigen::MatrixXd& b) const {
    check_rows(b);
    const Eigen::Index n = b.cols();
    const Eigen::Index m = m_;
    // (abc, l)
    const RowMatrix t1 = v_ * b;
    // (ab, k, l)
    RowMatrix t2(m * m, n * n);
    for (Eigen::Index ab = 0; ab < m * m; ++ab) {
      Eigen::Map<const RowMatrix> blk(t1.data() + ab * m * n, m, n);
      Eigen::Map<RowMatrix> dst(t2.data() + ab * n * n, n, n);
      dst.noalias() = b.transpose() * blk;
    }
    // (a, j, kl)
    Eigen::MatrixXd w(m, n * n * n);
    for (Eigen::Index a = 0; a < m; ++a) {
      Eigen::Map<const RowMatrix> blk(t2.data() + a * m * n * n, m, n * n);
      const RowMatrix r = b.transpose() * blk;  // n x n^2
      w.row(a) = Eigen::Map<const Eigen::RowVectorXd>(r.data(), n * n * n);
    }
    return w;
  }

  double energy(const Eigen::MatrixXd& b, const SpinSummedRdm& rdm) const {
    check(b, rdm);
    const Eigen::MatrixXd w = three_quarter(b);
    return energy_from(b, w, rdm);
  }

  /// dE/db, alpha and beta contributions summed into the shared block.
  Eigen::MatrixXd gradient(const Eigen::MatrixXd& b, const SpinSummedRdm& rdm) const {
    check(b, rdm);
    const Eigen::MatrixXd w = three_quarter(b);
    return gradient_from(b, w, rdm);
  }

  std::pair<double, Eigen::MatrixXd> energy_and_gradient(const Eigen::MatrixXd& b, const SpinSummedRdm& rdm) const {
    check(b, rdm);
    const Eigen::MatrixXd w = three_quarter(b);
    return {energy_from(b, w, rdm), gradient_from(b, w, rdm)};
  }

 private:
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  static Eigen::Index cube(int m) { return static_cast<Eigen::Index>(m) * m * m; }

  void check_rows(const Eigen::MatrixXd& b) const {
    if (b.rows() != m_)
      throw ShapeError("rotated energy: u has " + std::to_string(b.rows()) + " rows, integrals have " +
                       std::to_string(m_) + " spatial orbitals");
  }
  void check(const Eigen::MatrixXd& b, const SpinSummedRdm& rdm) const {
    check_rows(b);
    if (b.cols() != rdm.n_spatial)
      throw ShapeError("rotated energy: u has " + std::to_string(b.cols()) + " columns, RDMs cover " +
                       std::to_string(rdm.n_spatial) + " spatial orbitals");
  }

  static Eigen::Map<const Eigen::MatrixXd> d_matrix(const SpinSummedRdm& rdm) {
    // Column-major view: D(y, jkl) with y the leading index.
    const Eigen::Index n = rdm.n_spatial;
    return Eigen::Map<const Eigen::MatrixXd>(rdm.d.data(), n * n * n, n);
  }

  double energy_from(const Eigen::MatrixXd& b, const Eigen::MatrixXd& w, const SpinSummedRdm& rdm) const {
    const Eigen::MatrixXd ht = b.transpose() * h_ * b;
    const Eigen::MatrixXd vt = b.transpose() * w;  // n x n^3, row i, column jkl
    // rdm.d in row-major (i, jkl) equals column-major (jkl, i).
    const double two = (vt.transpose().cwiseProduct(d_matrix(rdm))).sum();
    return ht.cwiseProduct(rdm.gamma).sum() + 0.5 * two;
  }

  Eigen::MatrixXd gradient_from(const Eigen::MatrixXd& b, const Eigen::MatrixXd& w, const SpinSummedRdm& rdm) const {
    return 2.0 * h_ * b * rdm.gamma + 2.0 * w * d_matrix(rdm);
  }

  int m_;
  Eigen::MatrixXd h_;
  RowMatrix v_;
};

inline double rotated_energy(const PartialUnitary& u, const RDMPair& rdms, const MolecularIntegrals& ints) {
  return RotatedEnergyModel(ints).energy(u.block(), spin_sum(rdms));
}

inline Eigen::MatrixXd rotated_energy_gradient(const PartialUnitary& u, const RDMPair& rdms,
                                               const MolecularIntegrals& ints) {
  return RotatedEnergyModel(ints).gradient(u.block(), spin_sum(rdms));
}

inline MolecularIntegrals rotate_integrals(const MolecularIntegrals& ints, const Eigen::MatrixXd& b) {
  if (b.rows() != ints.m_spatial) throw ShapeError("rotate_integrals: row count does not match the integrals");
  const int n = static_cast<int>(b.cols());
  MolecularIntegrals out(n, ints.n_electrons, ints.ms2);
  out.h = b.transpose() * ints.h * b;
  const Eigen::MatrixXd w = RotatedEnergyModel(ints).three_quarter(b);
  const Eigen::MatrixXd vt = b.transpose() * w;
  for (int i = 0; i < n; ++i)
    for (int jkl = 0; jkl < n * n * n; ++jkl) out.v[static_cast<std::size_t>(i) * n * n * n + jkl] = vt(i, jkl);
  return out;
}

namespace detail {

inline void check_overlap_shapes(const PartialUnitary& uj, const PartialUnitary& uk, const FockVector& psi_j,
                                 const FockVector& psi_k) {
  if (uj.m_spatial() != uk.m_spatial() || uj.n_spatial() != uk.n_spatial())
    throw ShapeError("overlap: rotations have different shapes");
  if (psi_j.n_orbitals() != 2 * uj.n_spatial() || psi_k.n_orbitals() != 2 * uk.n_spatial())
    throw ShapeError("overlap: state size does not match the rotation");
}

/// Spin-form gradient folded into the spatial block.
inline Eigen::MatrixXd fold_spin(const Eigen::MatrixXd& g, int m, int n) {
  return g.topLeftCorner(m, n) + g.bottomRightCorner(m, n);
}

}  // namespace detail

/// <psi_j| U(u_j^T u_k) |psi_k>.
inline double overlap(const PartialUnitary& uj, const PartialUnitary& uk, const FockVector& psi_j,
                      const FockVector& psi_k) {
  detail::check_overlap_shapes(uj, uk, psi_j, psi_k);
  return psi_j.dot(apply_exterior_transform(inter_basis_map(uj, uk), psi_k));
}

/// d <psi_j| U(u_j^T u_k) |psi_k> / d b_k.
inline Eigen::MatrixXd overlap_value_gradient(const PartialUnitary& uj, const PartialUnitary& uk,
                                              const FockVector& psi_j, const FockVector& psi_k) {
  detail::check_overlap_shapes(uj, uk, psi_j, psi_k);
  const Eigen::MatrixXd t = transition_matrix(psi_j, inter_basis_map(uj, uk), psi_k);
  return detail::fold_spin(uj.spin_form() * t, uk.m_spatial(), uk.n_spatial());
}

/// d |<psi_j| U(u_j^T u_k) |psi_k>|^2 / d b_k.
inline Eigen::MatrixXd overlap_gradient(const PartialUnitary& uj, const PartialUnitary& uk, const FockVector& psi_j,
                                        const FockVector& psi_k) {
  return 2.0 * overlap(uj, uk, psi_j, psi_k) * overlap_value_gradient(uj, uk, psi_j, psi_k);
}

}  // namespace ssvqd
