// Copyright 2026 The ssvqd Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file ansatz.hpp
 * @brief Spin-orbital UCCSD in product form, applied exactly on FockVectors.
 *
 * Each factor is exp(t K) with K = G - G^T, G = a_a^dagger a_i (single) or
 * a_a^dagger a_b^dagger a_j a_i (double). K maps a determinant D that G
 * connects to s D' and D' to -s D, so the factor is a plane rotation on
 * every such pair and the identity elsewhere.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "ssvqd/error.hpp"
#include "ssvqd/fockspace.hpp"

namespace ssvqd {

enum class ExcitationKind { single = 1, double_ = 2 };

struct ExcitationOp {
  ExcitationKind kind = ExcitationKind::single;
  std::vector<int> occ;   ///< annihilated spin-orbitals, ascending
  std::vector<int> virt;  ///< created spin-orbitals, ascending

  auto key() const { return std::tie(kind, occ, virt); }
  bool operator==(const ExcitationOp& o) const { return key() == o.key(); }
  bool operator<(const ExcitationOp& o) const { return key() < o.key(); }

  std::string label() const {
    std::string s = kind == ExcitationKind::single ? "S(" : "D(";
    for (int i : occ) s += std::to_string(i) + " ";
    s += "->";
    for (int a : virt) s += " " + std::to_string(a);
    return s + ")";
  }
};

/// One plane rotation of a factor: basis state `from` maps to sign * `to` under G.
struct RotationPair {
  Bits from;
  Bits to;
  double sign;
};

/// Apply G of `op` to basis state `s`; returns false when G annihilates it.
inline bool apply_generator(const ExcitationOp& op, Bits s, Bits& out, double& sign) {
  OccupationIndex occ{s};
  double sg = 1.0;
  // a_j a_i: annihilate i first, then j.
  for (int i : op.occ) {
    if (!occ.occupied(i)) return false;
    sg *= parity(occ.count_below(i));
    occ.bits &= ~(Bits{1} << i);
  }
  // a_a^dagger a_b^dagger: create b first, then a.
  for (auto it = op.virt.rbegin(); it != op.virt.rend(); ++it) {
    if (occ.occupied(*it)) return false;
    sg *= parity(occ.count_below(*it));
    occ.bits |= Bits{1} << *it;
  }
  out = occ.bits;
  sign = sg;
  return true;
}

class AnsatzCircuit {
 public:
  AnsatzCircuit(int n_orbitals, std::vector<ExcitationOp> ops, int reps) : n_(n_orbitals), ops_(std::move(ops)), reps_(reps) {
    if (reps < 1) throw RangeError("AnsatzCircuit: reps must be at least 1");
    if (ops_.empty()) throw RangeError("AnsatzCircuit: no excitation operators");
    for (const auto& op : ops_) {
      std::vector<RotationPair> pairs;
      const Bits dim = Bits{1} << n_;
      for (Bits s = 0; s < dim; ++s) {
        Bits t = 0;
        double sign = 0.0;
        if (apply_generator(op, s, t, sign)) pairs.push_back({s, t, sign});
      }
      pairs_.push_back(std::move(pairs));
    }
  }

  int n_orbitals() const noexcept { return n_; }
  int reps() const noexcept { return reps_; }
  const std::vector<ExcitationOp>& ops() const noexcept { return ops_; }
  std::size_t n_params() const noexcept { return static_cast<std::size_t>(reps_) * ops_.size(); }
  const std::vector<RotationPair>& pairs(std::size_t op) const { return pairs_.at(op); }

 private:
  int n_;
  std::vector<ExcitationOp> ops_;
  int reps_;
  std::vector<std::vector<RotationPair>> pairs_;
};

/**
 * All spin-conserving singles and doubles from the HF occupation of the
 * (n_alpha, n_beta) sector, sorted by (kind, occ, virt), repeated `reps`
 * times with independent parameters.
 */
inline AnsatzCircuit build_uccsd(int n_orbitals, int n_alpha, int n_beta, int reps) {
  if (reps < 1) throw RangeError("build_uccsd: reps must be at least 1, got " + std::to_string(reps));
  if (n_orbitals <= 0 || n_orbitals % 2 != 0 || n_orbitals > FockVector::kMaxOrbitals)
    throw RangeError("build_uccsd: invalid spin-orbital count " + std::to_string(n_orbitals));
  const int m = n_orbitals / 2;
  if (n_alpha < 0 || n_beta < 0 || n_alpha > m || n_beta > m) throw RangeError("build_uccsd: infeasible sector");

  std::vector<int> occ_a, occ_b, vir_a, vir_b;
  for (int p = 0; p < m; ++p) (p < n_alpha ? occ_a : vir_a).push_back(p);
  for (int p = 0; p < m; ++p) (p < n_beta ? occ_b : vir_b).push_back(m + p);

  std::vector<ExcitationOp> ops;
  auto singles = [&](const std::vector<int>& o, const std::vector<int>& v) {
    for (int i : o)
      for (int a : v) ops.push_back({ExcitationKind::single, {i}, {a}});
  };
  auto same_spin_doubles = [&](const std::vector<int>& o, const std::vector<int>& v) {
    for (std::size_t i = 0; i < o.size(); ++i)
      for (std::size_t j = i + 1; j < o.size(); ++j)
        for (std::size_t a = 0; a < v.size(); ++a)
          for (std::size_t b = a + 1; b < v.size(); ++b)
            ops.push_back({ExcitationKind::double_, {o[i], o[j]}, {v[a], v[b]}});
  };
  singles(occ_a, vir_a);
  singles(occ_b, vir_b);
  same_spin_doubles(occ_a, vir_a);
  same_spin_doubles(occ_b, vir_b);
  for (int i : occ_a)
    for (int j : occ_b)
      for (int a : vir_a)
        for (int b : vir_b) ops.push_back({ExcitationKind::double_, {i, j}, {a, b}});
  if (ops.empty()) throw RangeError("build_uccsd: empty virtual space, no excitations available");
  std::sort(ops.begin(), ops.end());
  return AnsatzCircuit(n_orbitals, std::move(ops), reps);
}

/// Apply the factors in list order (parameter 0 first) to `ref`.
inline FockVector apply_ansatz(const AnsatzCircuit& circuit, std::span<const double> theta, const FockVector& ref) {
  if (theta.size() != circuit.n_params())
    throw ShapeError("apply_ansatz: expected " + std::to_string(circuit.n_params()) + " parameters, got " +
                     std::to_string(theta.size()));
  if (ref.n_orbitals() != circuit.n_orbitals()) throw ShapeError("apply_ansatz: reference has wrong orbital count");
  FockVector out = ref;
  auto& c = out.amplitudes();
  const std::size_t n_ops = circuit.ops().size();
  for (std::size_t p = 0; p < theta.size(); ++p) {
    const double t = theta[p];
    if (t == 0.0) continue;
    const double cs = std::cos(t);
    const double sn = std::sin(t);
    for (const auto& pr : circuit.pairs(p % n_ops)) {
      const auto d = static_cast<Eigen::Index>(pr.from);
      const auto dp = static_cast<Eigen::Index>(pr.to);
      const double x = c[d];
      const double y = c[dp];
      c[d] = cs * x - pr.sign * sn * y;
      c[dp] = cs * y + pr.sign * sn * x;
    }
  }
  return out;
}

inline FockVector apply_ansatz(const AnsatzCircuit& circuit, const std::vector<double>& theta, const FockVector& ref) {
  return apply_ansatz(circuit, std::span<const double>(theta), ref);
}

}  // namespace ssvqd
