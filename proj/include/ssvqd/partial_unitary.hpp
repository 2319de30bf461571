// Copyright 2026 The ssvqd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <random>
#include <string>
#include <vector>

#include "ssvqd/error.hpp"

namespace ssvqd {

/**
 * Orbital rotation u stored as its spatial block b (m_spatial x n_spatial).
 * The spin-orbital matrix is block-diagonal(b, b): alpha rows/columns first.
 */
class PartialUnitary {
 public:
  PartialUnitary() = default;
  explicit PartialUnitary(Eigen::MatrixXd block) : b_(std::move(block)) {}

  /// First n_spatial columns of the m_spatial identity.
  static PartialUnitary padded_identity(int m_spatial, int n_spatial) {
    if (n_spatial > m_spatial) throw RangeError("padded_identity: n_spatial exceeds m_spatial");
    return PartialUnitary(Eigen::MatrixXd::Identity(m_spatial, n_spatial));
  }

  /// Identity columns picked by 1-based spatial orbital index, e.g. {1,2,3,5}.
  static PartialUnitary select_columns(int m_spatial, const std::vector<int>& columns_one_based) {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m_spatial, static_cast<Eigen::Index>(columns_one_based.size()));
    std::vector<bool> used(static_cast<std::size_t>(m_spatial), false);
    for (std::size_t c = 0; c < columns_one_based.size(); ++c) {
      const int row = columns_one_based[c] - 1;
      if (row < 0 || row >= m_spatial)
        throw RangeError("select_columns: column index " + std::to_string(columns_one_based[c]) + " out of range");
      if (used[static_cast<std::size_t>(row)]) throw RangeError("select_columns: repeated column index");
      used[static_cast<std::size_t>(row)] = true;
      b(row, static_cast<Eigen::Index>(c)) = 1.0;
    }
    return PartialUnitary(std::move(b));
  }

  template <class Rng>
  static PartialUnitary random(int m_spatial, int n_spatial, Rng& rng) {
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd a(m_spatial, n_spatial);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    return PartialUnitary(qr.householderQ() * Eigen::MatrixXd::Identity(m_spatial, n_spatial));
  }

  int m_spatial() const noexcept { return static_cast<int>(b_.rows()); }
  int n_spatial() const noexcept { return static_cast<int>(b_.cols()); }
  const Eigen::MatrixXd& block() const noexcept { return b_; }

  Eigen::MatrixXd spin_form() const {
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(2 * b_.rows(), 2 * b_.cols());
    u.topLeftCorner(b_.rows(), b_.cols()) = b_;
    u.bottomRightCorner(b_.rows(), b_.cols()) = b_;
    return u;
  }

  /// max |b^T b - I|
  double orthonormality_defect() const {
    return (b_.transpose() * b_ - Eigen::MatrixXd::Identity(b_.cols(), b_.cols())).cwiseAbs().maxCoeff();
  }

 private:
  Eigen::MatrixXd b_;
};

/// Spin-orbital form of u_left^T u_right (N x N, block-diagonal).
inline Eigen::MatrixXd inter_basis_map(const PartialUnitary& left, const PartialUnitary& right) {
  if (left.m_spatial() != right.m_spatial()) throw ShapeError("inter_basis_map: row counts differ");
  const Eigen::MatrixXd s = left.block().transpose() * right.block();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * s.rows(), 2 * s.cols());
  out.topLeftCorner(s.rows(), s.cols()) = s;
  out.bottomRightCorner(s.rows(), s.cols()) = s;
  return out;
}

/**
 * Orth(A) = U V^T from the thin SVD A = U S V^T, i.e. the orthonormal frame
 * nearest to A in Frobenius norm. The product is independent of the sign
 * choice of singular vector pairs.
 */
inline Eigen::MatrixXd orth(const Eigen::MatrixXd& a) {
  if (a.rows() < a.cols()) throw ShapeError("orth: more columns than rows");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (s.size() > 0 && s[s.size() - 1] <= 1e-12)
    throw RankError("orth: matrix is rank deficient (smallest singular value " + std::to_string(s[s.size() - 1]) + ")");
  return svd.matrixU() * svd.matrixV().transpose();
}

/// Orth(b - eta * grad).
inline PartialUnitary projected_gd_step(const PartialUnitary& u, const Eigen::MatrixXd& grad, double eta) {
  if (grad.rows() != u.m_spatial() || grad.cols() != u.n_spatial())
    throw ShapeError("projected_gd_step: gradient shape does not match u");
  return PartialUnitary(orth(u.block() - eta * grad));
}

}  // namespace ssvqd
