// Copyright 2026 The ssvqd Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <random>

#include "oracles.hpp"
#include "ssvqd/ansatz.hpp"
#include "ssvqd/checks.hpp"

using namespace ssvqd;

namespace {

/// Dense generator G = a_virt^dagger... a_occ... over all 2^N states, from the brute-force operator algebra.
Eigen::MatrixXd dense_generator(const ExcitationOp& op, int n) {
  std::vector<oracle::Op> ops;
  for (int a : op.virt) ops.push_back({true, a});
  for (auto it = op.occ.rbegin(); it != op.occ.rend(); ++it) ops.push_back({false, *it});
  const int dim = 1 << n;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
  for (int s = 0; s < dim; ++s)
    if (auto r = oracle::apply_ops(ops, static_cast<std::uint64_t>(s))) g(static_cast<Eigen::Index>(r->second), s) += r->first;
  return g;
}

}  // namespace

TEST(Ansatz, ParameterCounts) {
  EXPECT_EQ(build_uccsd(4, 1, 1, 1).n_params(), 3u);
  EXPECT_EQ(build_uccsd(8, 2, 2, 1).n_params(), 26u);
  EXPECT_EQ(build_uccsd(8, 2, 2, 2).n_params(), 52u);
  EXPECT_EQ(build_uccsd(6, 2, 1, 1).n_params(), 8u);
  EXPECT_THROW(build_uccsd(4, 1, 1, 0), RangeError);
  EXPECT_THROW(build_uccsd(4, 2, 2, 1), RangeError);
}

TEST(Ansatz, OperatorsSortedSinglesFirst) {
  const auto c = build_uccsd(8, 2, 2, 1);
  const auto& ops = c.ops();
  EXPECT_TRUE(std::is_sorted(ops.begin(), ops.end()));
  EXPECT_EQ(ops.front().kind, ExcitationKind::single);
  EXPECT_EQ(ops.back().kind, ExcitationKind::double_);
  EXPECT_EQ(ops.front().label(), "S(0 -> 2)");
}

TEST(Ansatz, FactorsMatchDenseExponential) {
  std::mt19937_64 rng(21);
  const auto circuit = build_uccsd(6, 2, 1, 1);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  for (std::size_t p = 0; p < circuit.n_params(); ++p) {
    std::vector<double> theta(circuit.n_params(), 0.0);
    theta[p] = angle(rng);
    const Eigen::MatrixXd g = dense_generator(circuit.ops()[p], 6);
    const Eigen::MatrixXd k = theta[p] * (g - g.transpose());
    const Eigen::MatrixXd u = k.exp();
    const FockVector v = random_fock_vector(6, rng);
    const FockVector out = apply_ansatz(circuit, theta, v);
    EXPECT_LT((out.amplitudes() - u * v.amplitudes()).norm(), 1e-12) << circuit.ops()[p].label();
  }
}

TEST(Ansatz, ProductOrderAndRepetitions) {
  std::mt19937_64 rng(22);
  const auto circuit = build_uccsd(4, 1, 1, 2);
  std::vector<double> theta(circuit.n_params());
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  for (auto& t : theta) t = angle(rng);
  Eigen::MatrixXd u = Eigen::MatrixXd::Identity(16, 16);
  for (std::size_t p = 0; p < theta.size(); ++p) {
    const Eigen::MatrixXd g = dense_generator(circuit.ops()[p % circuit.ops().size()], 4);
    u = Eigen::MatrixXd((theta[p] * (g - g.transpose())).exp()) * u;
  }
  const FockVector ref = hf_reference(4, 1, 1);
  const FockVector out = apply_ansatz(circuit, theta, ref);
  EXPECT_LT((out.amplitudes() - u * ref.amplitudes()).norm(), 1e-12);
}

TEST(Ansatz, PreservesNormAndSector) {
  std::mt19937_64 rng(23);
  const auto circuit = build_uccsd(8, 2, 2, 2);
  std::vector<double> theta(circuit.n_params());
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  for (auto& t : theta) t = angle(rng);
  const FockVector out = apply_ansatz(circuit, theta, hf_reference(8, 2, 2));
  EXPECT_NEAR(out.norm(), 1.0, 1e-12);
  EXPECT_TRUE(in_sector(out, 2, 2, 1e-14));
  const FockVector zero = apply_ansatz(circuit, std::vector<double>(circuit.n_params(), 0.0), hf_reference(8, 2, 2));
  EXPECT_EQ(zero[0b00110011], 1.0);
  EXPECT_THROW(apply_ansatz(circuit, std::vector<double>(3, 0.0), hf_reference(8, 2, 2)), ShapeError);
  EXPECT_THROW(apply_ansatz(circuit, theta, hf_reference(6, 2, 2)), ShapeError);
}

TEST(Ansatz, SingleRotationAmplitudes) {
  const auto circuit = build_uccsd(4, 1, 1, 1);
  // Parameter 0 is the alpha single 0 -> 1.
  const FockVector out = apply_ansatz(circuit, std::vector<double>{0.3, 0.0, 0.0}, hf_reference(4, 1, 1));
  EXPECT_NEAR(out[0b0101], std::cos(0.3), 1e-15);
  EXPECT_NEAR(std::abs(out[0b0110]), std::sin(0.3), 1e-15);
}
