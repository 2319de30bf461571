// Copyright 2026 The ssvqd Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "ssvqd/checks.hpp"
#include "ssvqd/fci.hpp"

using namespace ssvqd;

TEST(Fci, BasisOrderingAndErrors) {
  const DeterminantBasis b = build_basis(8, 2, 1);
  EXPECT_EQ(b.size(), 24u);
  EXPECT_EQ(b.dets[1], b.alpha_strings[1] | (b.beta_strings[0] << 4));
  EXPECT_EQ(b.index_of(b.dets[7]), 7u);
  EXPECT_EQ(b.index_of(0), b.size());
  EXPECT_THROW(build_basis(7, 1, 1), RangeError);
  EXPECT_THROW(build_basis(4, 3, 0), RangeError);
}

struct SectorCase {
  int m, na, nb;
};

class DenseOracle : public ::testing::TestWithParam<SectorCase> {};

TEST_P(DenseOracle, SigmaMatchesSecondQuantizedDefinition) {
  const auto [m, na, nb] = GetParam();
  std::mt19937_64 rng(static_cast<std::uint64_t>(m * 100 + na * 10 + nb));
  MolecularIntegrals ints = random_integrals(m, na + nb, rng);
  ints.e_core = 0.37;
  const FciHamiltonian ham(ints, build_basis(2 * m, na, nb));
  const Eigen::MatrixXd ref = oracle::dense_hamiltonian(ints, na, nb);
  const Eigen::MatrixXd dense = ham.dense();
  EXPECT_LT((dense - ref - 0.37 * Eigen::MatrixXd::Identity(ref.rows(), ref.cols())).cwiseAbs().maxCoeff(), 1e-12);
  const Eigen::VectorXd x = Eigen::VectorXd::Random(ref.rows());
  EXPECT_LT((ham.apply(x) - dense * x).norm(), 1e-12);
  EXPECT_LT((ham.diagonal() - dense.diagonal()).norm(), 1e-12);
  EXPECT_THROW(ham.apply(Eigen::VectorXd::Zero(ref.rows() + 1)), ShapeError);
}

INSTANTIATE_TEST_SUITE_P(Sectors, DenseOracle,
                         ::testing::Values(SectorCase{2, 1, 1}, SectorCase{3, 2, 1}, SectorCase{4, 2, 2},
                                           SectorCase{4, 3, 1}, SectorCase{5, 2, 2}, SectorCase{4, 0, 2}));

TEST(Fci, DavidsonMatchesDenseSpectrum) {
  std::mt19937_64 rng(17);
  const MolecularIntegrals ints = random_integrals(6, 6, rng);
  const DeterminantBasis basis = build_basis(12, 3, 3);
  const FciHamiltonian ham(ints, basis);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ham.dense());
  const EigenResult r = lowest_eigenpairs(ham, 5);
  for (int i = 0; i < 5; ++i) {
    EXPECT_NEAR(r.energies[i], es.eigenvalues()[i], 1e-8);
    const Eigen::VectorXd v = r.vectors.col(i);
    EXPECT_LT((ham.apply(v) - r.energies[i] * v).norm(), 1e-6);
  }
  EXPECT_LT((r.vectors.transpose() * r.vectors - Eigen::MatrixXd::Identity(5, 5)).norm(), 1e-10);
}

TEST(Fci, H2SpectrumMatchesOracleAndReference) {
  const MolecularIntegrals ints = read_fcidump(oracle::data_path("h2_631g.fcidump"));
  const EigenResult r = lowest_eigenpairs(ints, build_basis(8, 1, 1), 3);
  const Eigen::VectorXd ref = oracle::dense_spectrum(ints, 1, 1);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(r.electronic(i), ref[i], 1e-9);
  EXPECT_NEAR(r.electronic(0), -1.872, 2e-3);
  EXPECT_NEAR(r.electronic(1), -1.474, 2e-3);
  EXPECT_NEAR(r.energies[0] - r.electronic(0), ints.e_core, 1e-15);
}

TEST(Fci, DegenerateRootsAreCanonical) {
  // Two orbitals with equal energies: the one-electron states are degenerate.
  MolecularIntegrals ints(3, 1, 1);
  ints.h(0, 0) = -1.0;
  ints.h(1, 1) = ints.h(2, 2) = -0.5;
  const EigenResult r = lowest_eigenpairs(ints, build_basis(6, 1, 0), 3);
  EXPECT_NEAR(r.energies[1], r.energies[2], 1e-12);
  for (int i = 0; i < 3; ++i) {
    Eigen::Index lead;
    r.vectors.col(i).cwiseAbs().maxCoeff(&lead);
    EXPECT_EQ(lead, i);
    EXPECT_GT(r.vectors(lead, i), 0.0);
    EXPECT_NEAR(std::abs(r.vectors(lead, i)), 1.0, 1e-10);
  }
}

TEST(Fci, OverlapWithActiveEmbedsThroughRotation) {
  const MolecularIntegrals ints = read_fcidump(oracle::data_path("h2_631g.fcidump"));
  const DeterminantBasis full = build_basis(8, 1, 1);
  const EigenResult r = lowest_eigenpairs(ints, full, 1);
  // Active space = all orbitals, u = identity: overlap of the FCI vector with itself.
  FockVector psi(8);
  for (std::size_t i = 0; i < full.size(); ++i) psi[full.dets[i]] = r.vectors(static_cast<Eigen::Index>(i), 0);
  EXPECT_NEAR(fci_overlap_with_active(r.vectors.col(0), full, PartialUnitary::padded_identity(4, 4), psi), 1.0, 1e-10);
  const FockVector hf = hf_reference(4, 1, 1);
  const double c0 = r.vectors(static_cast<Eigen::Index>(full.index_of(0b00010001)), 0);
  EXPECT_NEAR(fci_overlap_with_active(r.vectors.col(0), full, PartialUnitary::padded_identity(4, 2), hf), c0, 1e-12);
  EXPECT_THROW(fci_overlap_with_active(r.vectors.col(0), full, PartialUnitary::padded_identity(4, 3), hf), ShapeError);
}
