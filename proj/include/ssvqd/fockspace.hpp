// Copyright 2026 The ssvqd Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file fockspace.hpp
 * @brief Occupation-number states, fermionic operators and the exterior-power
 *        extension U(m) of a single-particle linear map.
 *
 * Basis states are bit masks with ascending orbital ordering, so the sign of
 * a_i or a_i^dagger is (-1)^(number of occupied orbitals below i). With both
 * input and output bases ascending, <J|U(m)|I> is the determinant of the
 * J-rows x I-columns minor of m.
 */

#pragma once

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ssvqd/error.hpp"

namespace ssvqd {

using Bits = std::uint64_t;

/// Occupation bit mask; bit i set iff spin-orbital i is occupied.
struct OccupationIndex {
  Bits bits = 0;

  constexpr bool occupied(int i) const noexcept { return (bits >> i) & Bits{1}; }
  constexpr int particles() const noexcept { return std::popcount(bits); }
  /// Number of occupied orbitals strictly below `i`.
  constexpr int count_below(int i) const noexcept {
    return std::popcount(bits & ((Bits{1} << i) - Bits{1}));
  }
  friend constexpr bool operator==(OccupationIndex, OccupationIndex) = default;
};

constexpr double parity(int n) noexcept { return (n & 1) ? -1.0 : 1.0; }

/// All masks over `n` orbitals with exactly `k` bits set, ascending.
inline std::vector<Bits> combinations(int n, int k) {
  std::vector<Bits> out;
  if (k < 0 || k > n) return out;
  if (k == 0) return {Bits{0}};
  Bits x = (Bits{1} << k) - 1;
  const Bits limit = Bits{1} << n;
  while (x < limit) {
    out.push_back(x);
    const Bits c = x & (~x + 1);
    const Bits r = x + c;
    x = (((r ^ x) >> 2) / c) | r;
  }
  return out;
}

/// Determinant of a k x k row-major matrix held in `a` (overwritten).
inline double small_determinant(double* a, int k) noexcept {
  switch (k) {
    case 0:
      return 1.0;
    case 1:
      return a[0];
    case 2:
      return a[0] * a[3] - a[1] * a[2];
    case 3:
      return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
             a[2] * (a[3] * a[7] - a[4] * a[6]);
    default:
      break;
  }
  double det = 1.0;
  for (int c = 0; c < k; ++c) {
    int piv = c;
    for (int r = c + 1; r < k; ++r)
      if (std::abs(a[r * k + c]) > std::abs(a[piv * k + c])) piv = r;
    if (a[piv * k + c] == 0.0) return 0.0;
    if (piv != c) {
      for (int j = 0; j < k; ++j) std::swap(a[c * k + j], a[piv * k + j]);
      det = -det;
    }
    const double d = a[c * k + c];
    det *= d;
    for (int r = c + 1; r < k; ++r) {
      const double f = a[r * k + c] / d;
      if (f == 0.0) continue;
      for (int j = c + 1; j < k; ++j) a[r * k + j] -= f * a[c * k + j];
    }
  }
  return det;
}

/// Amplitude vector over the 2^N occupation-number basis states.
class FockVector {
 public:
  static constexpr int kMaxOrbitals = 24;

  FockVector() = default;

  explicit FockVector(int n_orbitals) : n_(n_orbitals) {
    if (n_orbitals < 0 || n_orbitals > kMaxOrbitals)
      throw RangeError("FockVector supports 0.." + std::to_string(kMaxOrbitals) + " orbitals");
    amps_ = Eigen::VectorXd::Zero(Eigen::Index{1} << n_orbitals);
  }

  static FockVector basis_state(int n_orbitals, Bits bits, double amplitude = 1.0) {
    FockVector v(n_orbitals);
    v[bits] = amplitude;
    return v;
  }

  int n_orbitals() const noexcept { return n_; }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(amps_.size()); }

  double& operator[](Bits bits) { return amps_[static_cast<Eigen::Index>(bits)]; }
  double operator[](Bits bits) const { return amps_[static_cast<Eigen::Index>(bits)]; }

  const Eigen::VectorXd& amplitudes() const noexcept { return amps_; }
  Eigen::VectorXd& amplitudes() noexcept { return amps_; }

  double norm() const { return amps_.norm(); }
  void normalize() { amps_ /= amps_.norm(); }

  double dot(const FockVector& other) const {
    if (other.n_ != n_) throw ShapeError("FockVector dot: orbital counts differ");
    return amps_.dot(other.amps_);
  }

  FockVector& operator+=(const FockVector& o) {
    if (o.n_ != n_) throw ShapeError("FockVector +=: orbital counts differ");
    amps_ += o.amps_;
    return *this;
  }
  FockVector& operator*=(double s) {
    amps_ *= s;
    return *this;
  }

 private:
  int n_ = 0;
  Eigen::VectorXd amps_;
};

/// Rows = output orbitals N', cols = input orbitals N. Not required to be unitary.
using LinearOrbitalMap = Eigen::MatrixXd;

inline void check_orbital(int i, int n, const char* what) {
  if (i < 0 || i >= n)
    throw RangeError(std::string(what) + ": orbital index " + std::to_string(i) + " outside [0, " +
                     std::to_string(n) + ")");
}

inline FockVector apply_creator(int i, const FockVector& v) {
  check_orbital(i, v.n_orbitals(), "apply_creator");
  FockVector out(v.n_orbitals());
  const Bits bit = Bits{1} << i;
  const auto& a = v.amplitudes();
  for (Eigen::Index s = 0; s < a.size(); ++s) {
    const Bits b = static_cast<Bits>(s);
    if ((b & bit) || a[s] == 0.0) continue;
    out[b | bit] += parity(OccupationIndex{b}.count_below(i)) * a[s];
  }
  return out;
}

inline FockVector apply_annihilator(int i, const FockVector& v) {
  check_orbital(i, v.n_orbitals(), "apply_annihilator");
  FockVector out(v.n_orbitals());
  const Bits bit = Bits{1} << i;
  const auto& a = v.amplitudes();
  for (Eigen::Index s = 0; s < a.size(); ++s) {
    const Bits b = static_cast<Bits>(s);
    if (!(b & bit) || a[s] == 0.0) continue;
    out[b & ~bit] += parity(OccupationIndex{b}.count_below(i)) * a[s];
  }
  return out;
}

/// <J|U(m)|I> = det m[J rows, I cols]; zero unless |J| == |I|.
inline double exterior_matrix_element(const LinearOrbitalMap& m, Bits rows, Bits cols) {
  const int k = std::popcount(cols);
  if (std::popcount(rows) != k) return 0.0;
  double buf[64 * 64];
  if (k > 64) throw RangeError("exterior_matrix_element: too many particles");
  int r = 0;
  for (Bits rr = rows; rr; rr &= rr - 1, ++r) {
    const int row = std::countr_zero(rr);
    int c = 0;
    for (Bits cc = cols; cc; cc &= cc - 1, ++c) buf[r * k + c] = m(row, std::countr_zero(cc));
  }
  return small_determinant(buf, k);
}

/**
 * U(m) applied to `v` (over m.cols() orbitals), giving a vector over m.rows()
 * orbitals. Each k-particle input state is expanded over every k-subset of
 * the output orbitals with the corresponding minor determinant as weight.
 */
inline FockVector apply_exterior_transform(const LinearOrbitalMap& m, const FockVector& v) {
  if (m.cols() != v.n_orbitals())
    throw ShapeError("apply_exterior_transform: map has " + std::to_string(m.cols()) + " columns, vector has " +
                     std::to_string(v.n_orbitals()) + " orbitals");
  const int n_out = static_cast<int>(m.rows());
  const int n_in = v.n_orbitals();
  FockVector out(n_out);
  const auto& a = v.amplitudes();
  for (int k = 0; k <= n_in; ++k) {
    std::vector<Bits> inputs;
    for (Bits b : combinations(n_in, k))
      if (a[static_cast<Eigen::Index>(b)] != 0.0) inputs.push_back(b);
    if (inputs.empty()) continue;
    const auto outputs = combinations(n_out, k);
    for (Bits in : inputs) {
      const double amp = a[static_cast<Eigen::Index>(in)];
      for (Bits o : outputs) out[o] += exterior_matrix_element(m, o, in) * amp;
    }
  }
  return out;
}

/// Amplitudes of U(m) v on an explicit list of output states (for large N').
inline Eigen::VectorXd apply_exterior_transform_onto(const LinearOrbitalMap& m, const FockVector& v,
                                                     const std::vector<Bits>& targets) {
  if (m.cols() != v.n_orbitals()) throw ShapeError("apply_exterior_transform_onto: shape mismatch");
  const int n_out = static_cast<int>(m.rows());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(targets.size()));
  const auto& a = v.amplitudes();
  std::vector<Bits> inputs;
  for (Eigen::Index s = 0; s < a.size(); ++s)
    if (a[s] != 0.0) inputs.push_back(static_cast<Bits>(s));
  for (std::size_t t = 0; t < targets.size(); ++t) {
    if (n_out < 64 && (targets[t] >> n_out) != 0) throw RangeError("apply_exterior_transform_onto: target out of range");
    double acc = 0.0;
    for (Bits in : inputs) acc += exterior_matrix_element(m, targets[t], in) * a[static_cast<Eigen::Index>(in)];
    out[static_cast<Eigen::Index>(t)] = acc;
  }
  return out;
}

/// <bra| a_i^dagger U(m) a_q |ket>.
inline double transition_element(const FockVector& bra, int i, const LinearOrbitalMap& m, int q,
                                 const FockVector& ket) {
  if (bra.n_orbitals() != m.rows() || ket.n_orbitals() != m.cols())
    throw ShapeError("transition_element: bra/ket orbital counts do not match the map");
  check_orbital(i, bra.n_orbitals(), "transition_element");
  check_orbital(q, ket.n_orbitals(), "transition_element");
  return bra.dot(apply_creator(i, apply_exterior_transform(m, apply_annihilator(q, ket))));
}

/// T(i, q) = <bra| a_i^dagger U(m) a_q |ket> for all i, q.
inline Eigen::MatrixXd transition_matrix(const FockVector& bra, const LinearOrbitalMap& m, const FockVector& ket) {
  if (bra.n_orbitals() != m.rows() || ket.n_orbitals() != m.cols())
    throw ShapeError("transition_matrix: bra/ket orbital counts do not match the map");
  const int n_out = static_cast<int>(m.rows());
  const int n_in = static_cast<int>(m.cols());
  std::vector<FockVector> reduced_bra;
  reduced_bra.reserve(static_cast<std::size_t>(n_out));
  for (int i = 0; i < n_out; ++i) reduced_bra.push_back(apply_annihilator(i, bra));
  Eigen::MatrixXd t(n_out, n_in);
  for (int q = 0; q < n_in; ++q) {
    const FockVector phi = apply_exterior_transform(m, apply_annihilator(q, ket));
    for (int i = 0; i < n_out; ++i) t(i, q) = reduced_bra[static_cast<std::size_t>(i)].dot(phi);
  }
  return t;
}

/// Alpha occupation of a mask whose low `n_spatial` bits are the alpha block.
constexpr int alpha_count(Bits b, int n_spatial) noexcept {
  return std::popcount(b & ((Bits{1} << n_spatial) - 1));
}
constexpr int beta_count(Bits b, int n_spatial) noexcept { return std::popcount(b >> n_spatial); }

/// Lowest n_alpha alpha and n_beta beta orbitals filled.
inline FockVector hf_reference(int n_orbitals, int n_alpha, int n_beta) {
  if (n_orbitals % 2 != 0) throw RangeError("hf_reference: orbital count must be even");
  const int half = n_orbitals / 2;
  if (n_alpha < 0 || n_beta < 0 || n_alpha > half || n_beta > half)
    throw RangeError("hf_reference: sector (" + std::to_string(n_alpha) + ", " + std::to_string(n_beta) +
                     ") impossible with " + std::to_string(n_orbitals) + " spin-orbitals");
  const Bits bits = ((Bits{1} << n_alpha) - 1) | (((Bits{1} << n_beta) - 1) << half);
  return FockVector::basis_state(n_orbitals, bits);
}

/// Basis states of the (n_alpha, n_beta) sector, ascending.
inline std::vector<Bits> sector_states(int n_orbitals, int n_alpha, int n_beta) {
  const int half = n_orbitals / 2;
  std::vector<Bits> out;
  for (Bits b : combinations(half, n_beta))
    for (Bits a : combinations(half, n_alpha)) out.push_back(a | (b << half));
  return out;
}

/// True if every non-zero amplitude lies in the (n_alpha, n_beta) sector.
inline bool in_sector(const FockVector& v, int n_alpha, int n_beta, double tol = 0.0) {
  const int half = v.n_orbitals() / 2;
  const auto& a = v.amplitudes();
  for (Eigen::Index s = 0; s < a.size(); ++s) {
    if (std::abs(a[s]) <= tol) continue;
    const Bits b = static_cast<Bits>(s);
    if (alpha_count(b, half) != n_alpha || beta_count(b, half) != n_beta) return false;
  }
  return true;
}

}  // namespace ssvqd
