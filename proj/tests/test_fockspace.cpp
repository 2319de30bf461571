// Copyright 2026 The ssvqd Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "ssvqd/checks.hpp"
#include "ssvqd/fockspace.hpp"

using namespace ssvqd;

TEST(FockSpace, CreatorSignCountsOccupiedBelow) {
  // |0b101> has orbitals 0 and 2 filled.
  const FockVector v = FockVector::basis_state(3, 0b101);
  const FockVector c = apply_creator(1, v);
  EXPECT_DOUBLE_EQ(c[0b111], -1.0);
  EXPECT_DOUBLE_EQ(apply_creator(0, v).norm(), 0.0);
  EXPECT_DOUBLE_EQ(apply_annihilator(2, v)[0b001], -1.0);
  EXPECT_DOUBLE_EQ(apply_annihilator(0, v)[0b100], 1.0);
  EXPECT_THROW(apply_creator(3, v), RangeError);
}

TEST(FockSpace, OperatorsMatchBruteForceSigns) {
  for (Bits s = 0; s < 32; ++s)
    for (int i = 0; i < 5; ++i) {
      const FockVector e = FockVector::basis_state(5, s);
      const auto ref_c = oracle::apply_ops({{true, i}}, s);
      const FockVector c = apply_creator(i, e);
      if (ref_c) {
        EXPECT_DOUBLE_EQ(c[ref_c->second], ref_c->first);
      } else {
        EXPECT_EQ(c.norm(), 0.0);
      }
      const auto ref_a = oracle::apply_ops({{false, i}}, s);
      const FockVector a = apply_annihilator(i, e);
      if (ref_a) {
        EXPECT_DOUBLE_EQ(a[ref_a->second], ref_a->first);
      } else {
        EXPECT_EQ(a.norm(), 0.0);
      }
    }
}

TEST(FockSpace, MatrixElementIsLeibnizMinor) {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd m = random_matrix(6, 5, rng);
  for (int k = 0; k <= 4; ++k)
    for (Bits cols : combinations(5, k))
      for (Bits rows : combinations(6, k)) {
        Eigen::MatrixXd sub(k, k);
        int r = 0;
        for (int i = 0; i < 6; ++i) {
          if (!((rows >> i) & 1)) continue;
          int c = 0;
          for (int j = 0; j < 5; ++j)
            if ((cols >> j) & 1) sub(r, c++) = m(i, j);
          ++r;
        }
        const double ref = k == 0 ? 1.0 : oracle::leibniz_det(sub);
        EXPECT_NEAR(exterior_matrix_element(m, rows, cols), ref, 1e-12);
      }
  EXPECT_EQ(exterior_matrix_element(m, 0b11, 0b1), 0.0);
}

TEST(FockSpace, IdentityAndOrthogonalMaps) {
  std::mt19937_64 rng(5);
  const FockVector v = random_fock_vector(5, rng);
  const FockVector same = apply_exterior_transform(Eigen::MatrixXd::Identity(5, 5), v);
  EXPECT_LT((same.amplitudes() - v.amplitudes()).norm(), 1e-14);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(5, 5, rng));
  const Eigen::MatrixXd q = qr.householderQ();
  EXPECT_NEAR(apply_exterior_transform(q, v).norm(), v.norm(), 1e-12);
  EXPECT_THROW(apply_exterior_transform(Eigen::MatrixXd::Identity(4, 4), v), ShapeError);
}

TEST(FockSpace, ScalarMapScalesByPowerOfParticleNumber) {
  const FockVector e = FockVector::basis_state(4, 0b1011);
  const FockVector out = apply_exterior_transform(2.0 * Eigen::MatrixXd::Identity(4, 4), e);
  EXPECT_DOUBLE_EQ(out[0b1011], 8.0);
}

TEST(FockSpace, TransformOntoTargetsMatchesFullTransform) {
  std::mt19937_64 rng(9);
  const Eigen::MatrixXd m = random_matrix(6, 4, rng);
  const FockVector v = random_sector_state(4, 1, 1, rng);
  const FockVector full = apply_exterior_transform(m, v);
  const auto targets = combinations(6, 2);
  const Eigen::VectorXd part = apply_exterior_transform_onto(m, v, targets);
  for (std::size_t t = 0; t < targets.size(); ++t) EXPECT_NEAR(part[static_cast<Eigen::Index>(t)], full[targets[t]], 1e-13);
}

TEST(FockSpace, TransitionMatrixMatchesElementwiseDefinition) {
  std::mt19937_64 rng(11);
  const Eigen::MatrixXd m = random_matrix(4, 4, rng);
  const FockVector bra = random_sector_state(4, 1, 1, rng);
  const FockVector ket = random_sector_state(4, 1, 1, rng);
  const Eigen::MatrixXd t = transition_matrix(bra, m, ket);
  for (int i = 0; i < 4; ++i)
    for (int q = 0; q < 4; ++q) EXPECT_NEAR(t(i, q), transition_element(bra, i, m, q, ket), 1e-13);
}

TEST(FockSpace, SectorsAndReference) {
  EXPECT_EQ(combinations(6, 3).size(), 20u);
  const auto states = sector_states(8, 2, 2);
  EXPECT_EQ(states.size(), 36u);
  for (Bits s : states) EXPECT_EQ(std::popcount(s), 4);
  const FockVector hf = hf_reference(8, 2, 2);
  EXPECT_DOUBLE_EQ(hf[0b00110011], 1.0);
  EXPECT_TRUE(in_sector(hf, 2, 2));
  EXPECT_FALSE(in_sector(hf, 1, 2));
  EXPECT_THROW(hf_reference(7, 1, 1), RangeError);
  EXPECT_THROW(hf_reference(4, 3, 0), RangeError);
  EXPECT_THROW(FockVector(FockVector::kMaxOrbitals + 1), RangeError);
}

TEST(FockSpace, ExteriorSuitePasses) {
  ExteriorSuiteOptions opt;
  opt.random_maps = 40;
  const CheckReport r = exterior_suite(1, opt);
  for (const auto& c : r) EXPECT_TRUE(c.passed()) << c.name << " worst " << c.worst;
}
