#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dephase/sampling.hpp"
#include "dephase/statevec.hpp"
#include "oracles.hpp"

using namespace dephase;

namespace {

Eigen::MatrixXcd to_eigen(const oracle::Matrix& m) {
  Eigen::MatrixXcd out(m.size(), m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) out(i, j) = m[i][j];
  return out;
}

Eigen::MatrixXcd random_unitary(int dim, Rng& rng) {
  Eigen::MatrixXcd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  return qr.householderQ();
}

}  // namespace

TEST(Tensor, BasisProduct) {
  const PureState s = tensor(PureState::basis(1, 0), PureState::basis(1, 1));
  ASSERT_EQ(s.n_qubits(), 2);
  EXPECT_EQ(s.amplitude(1), cplx(1.0));
  EXPECT_EQ(s.amplitude(0), cplx(0.0));
}

TEST(Tensor, PlusTimesPlusIsUniform) {
  const double r = 1.0 / std::sqrt(2.0);
  const PureState plus = PureState::dense(1, {r, r});
  const PureState s = tensor(plus, plus);
  for (BasisIndex j = 0; j < 4; ++j) EXPECT_NEAR(std::abs(s.amplitude(j) - cplx(0.5)), 0.0, 1e-15);
}

TEST(Tensor, MatchesDoubleLoop) {
  Rng rng(11, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const PureState a = haar_state(1, rng);
    const PureState b = haar_state(trial % 3 + 1, rng);
    const auto expected = oracle::kron(a.to_dense(), b.to_dense());
    const auto got = tensor(a, b).to_dense();
    ASSERT_EQ(got.size(), expected.size());
    for (std::size_t j = 0; j < got.size(); ++j) EXPECT_NEAR(std::abs(got[j] - expected[j]), 0.0, 1e-15);
  }
}

TEST(ReduceToQubit, ProductState) {
  const DensityMatrix r = reduce_to_qubit(PureState::basis(2, 1), 1);
  EXPECT_NEAR(std::abs(r(0, 0)), 0.0, 1e-15);
  EXPECT_NEAR(r(1, 1).real(), 1.0, 1e-15);
}

TEST(ReduceToQubit, BellMarginalIsMaximallyMixed) {
  const double r = 1.0 / std::sqrt(2.0);
  const DensityMatrix m = reduce_to_qubit(PureState::dense(2, {r, 0, 0, r}), 0);
  EXPECT_NEAR(m(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(m(1, 1).real(), 0.5, 1e-15);
  EXPECT_NEAR(std::abs(m(0, 1)), 0.0, 1e-15);
}

TEST(ReduceToQubit, MatchesBruteForcePartialTrace) {
  Rng rng(12, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const PureState s = haar_state(3, rng);
    const auto full = oracle::outer(s.to_dense());
    for (int q = 0; q < 3; ++q) {
      const auto expected = oracle::partial_trace_to_qubit(full, 3, q);
      const DensityMatrix got = reduce_to_qubit(s, q);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_NEAR(std::abs(got(i, j) - expected[i][j]), 0.0, 1e-14);
    }
  }
}

TEST(ReduceToQubit, RejectsBadIndex) {
  EXPECT_THROW(reduce_to_qubit(PureState::basis(2, 0), 2), std::out_of_range);
  EXPECT_THROW(reduce_to_qubit(PureState::basis(2, 0), -1), std::out_of_range);
}

TEST(VonNeumannEntropy, PureProjectorIsZero) {
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix::projector(PureState::basis(1, 0))), 0.0, 1e-12);
}

TEST(VonNeumannEntropy, MaximallyMixedQubit) {
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix(Eigen::MatrixXcd::Identity(2, 2) * 0.5)), 1.0, 1e-12);
}

TEST(VonNeumannEntropy, DiagonalExample) {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(4, 4);
  d(0, 0) = 0.8;
  d(1, 1) = 0.1;
  d(2, 2) = 0.1;
  const double expected = oracle::entropy_bits({0.8, 0.1, 0.1, 0.0});
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix(d)), expected, 1e-12);
  EXPECT_NEAR(expected, 0.9219, 5e-5);
}

TEST(VonNeumannEntropy, RejectsNonHermitian) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(2, 2) * 0.5;
  m(0, 1) = 0.3;
  EXPECT_THROW(von_neumann_entropy(m), std::invalid_argument);
  EXPECT_THROW(DensityMatrix{m}, std::invalid_argument);
}

TEST(HermitianEigenvalues, SimpleCases) {
  const auto half = hermitian_eigenvalues(Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(2, 2) * 0.5));
  ASSERT_EQ(half.size(), 2u);
  EXPECT_NEAR(half[0], 0.5, 1e-15);
  EXPECT_NEAR(half[1], 0.5, 1e-15);

  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(2, 2);
  d(0, 0) = 0.25;
  d(1, 1) = 0.75;
  const auto ev = hermitian_eigenvalues(d);
  EXPECT_NEAR(ev[0], 0.75, 1e-15);
  EXPECT_NEAR(ev[1], 0.25, 1e-15);
}

TEST(HermitianEigenvalues, MatchesCharacteristicPolynomialRoots) {
  Rng rng(13, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto psi = haar_state(3, rng).to_dense();
    // Two-qubit reduced state of a random 3-qubit pure state: generic 4x4.
    oracle::Matrix rho(4, std::vector<cplx>(4));
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 2; ++c) rho[a][b] += psi[2 * a + c] * std::conj(psi[2 * b + c]);
    // Schmidt rank 2: two positive roots and a double root at 0 that has no
    // sign change, so only the positive roots are compared against bisection.
    std::vector<double> expected;
    for (double r : oracle::eigenvalues_by_bisection(rho))
      if (r > 1e-6) expected.push_back(r);
    const auto got = hermitian_eigenvalues(to_eigen(rho));
    ASSERT_EQ(got.size(), 4u);
    ASSERT_EQ(expected.size(), 2u);
    EXPECT_NEAR(got[0], expected[0], 1e-9);
    EXPECT_NEAR(got[1], expected[1], 1e-9);
    EXPECT_NEAR(got[2], 0.0, 1e-9);
    EXPECT_NEAR(got[3], 0.0, 1e-9);
  }
}

TEST(HermitianEigenvalues, GenericMatrixAgainstBisection) {
  Rng rng(14, 0);
  for (int trial = 0; trial < 10; ++trial) {
    oracle::Matrix h(4, std::vector<cplx>(4));
    for (int i = 0; i < 4; ++i) {
      h[i][i] = rng.uniform() * 2.0 - 1.0;
      for (int j = i + 1; j < 4; ++j) {
        h[i][j] = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
        h[j][i] = std::conj(h[i][j]);
      }
    }
    const auto expected = oracle::eigenvalues_by_bisection(h);
    const auto got = hermitian_eigenvalues(to_eigen(h));
    ASSERT_EQ(expected.size(), 4u);
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(got[k], expected[k], 1e-9);
    for (int k = 0; k + 1 < 4; ++k) EXPECT_GE(got[k], got[k + 1]);
  }
}

TEST(PureStateInvariants, SparseRejectsBadSupport) {
  EXPECT_THROW(PureState::sparse(3, {2, 1}, {cplx(std::sqrt(0.5)), cplx(std::sqrt(0.5))}), std::invalid_argument);
  EXPECT_THROW(PureState::sparse(3, {1, 2}, {cplx(1.0), cplx(0.0)}), std::invalid_argument);
  EXPECT_THROW(PureState::dense(1, {1.0, 1.0}), std::invalid_argument);
}

TEST(PureStateInvariants, SparseAndDenseAgree) {
  const double r = 1.0 / std::sqrt(2.0);
  const PureState sp = PureState::sparse(3, {1, 6}, {cplx(r), cplx(0.0, r)});
  const PureState de = PureState::dense(3, sp.to_dense());
  EXPECT_TRUE(sp.is_sparse());
  EXPECT_FALSE(de.is_sparse());
  for (int q = 0; q < 3; ++q) {
    const auto a = qubit_marginal(sp, q);
    const auto b = qubit_marginal(de, q);
    EXPECT_NEAR(a.p1, b.p1, 1e-15);
    EXPECT_NEAR(std::abs(a.coherence - b.coherence), 0.0, 1e-15);
  }
}

TEST(PureStateInvariants, FromSupportGoesSparseAboveTwelveQubits) {
  EXPECT_TRUE(PureState::from_support(20, {0}, {cplx(1.0)}).is_sparse());
  EXPECT_FALSE(PureState::from_support(4, {0}, {cplx(1.0)}).is_sparse());
}

TEST(StatevecProperties, SampledStatesAreNormalized) {
  Rng rng(15, 0);
  for (int trial = 0; trial < 2000; ++trial) {
    const PureState s = haar_state(trial % 6 + 1, rng);
    EXPECT_LT(std::abs(s.norm_squared() - 1.0), 1e-10);
  }
}

TEST(StatevecProperties, MarginalsAreValid) {
  Rng rng(16, 0);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = trial % 5 + 1;
    const PureState s = haar_state(n, rng);
    for (int q = 0; q < n; ++q) {
      const Eigen::MatrixXcd m = reduce_to_qubit(s, q).matrix();
      EXPECT_NEAR(m.trace().real(), 1.0, 1e-10);
      for (double l : hermitian_eigenvalues(m)) {
        EXPECT_GE(l, -1e-9);
        EXPECT_LE(l, 1.0 + 1e-9);
      }
    }
  }
}

TEST(StatevecProperties, EntropyIsUnitarilyInvariantAndBounded) {
  Rng rng(17, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = trial % 2 == 0 ? 2 : 4;
    // Random mixed state: partial trace of a larger Haar state.
    const auto psi = haar_state(dim == 2 ? 3 : 4, rng).to_dense();
    const int env = static_cast<int>(psi.size()) / dim;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        for (int c = 0; c < env; ++c) rho(a, b) += psi[a * env + c] * std::conj(psi[b * env + c]);
    const Eigen::MatrixXcd u = random_unitary(dim, rng);
    const Eigen::MatrixXcd rotated = u * rho * u.adjoint();
    const double s0 = von_neumann_entropy(rho);
    const double s1 = von_neumann_entropy(Eigen::MatrixXcd(0.5 * (rotated + rotated.adjoint())));
    EXPECT_NEAR(s0, s1, 1e-8);
    EXPECT_GE(s0, -1e-12);
    EXPECT_LE(s0, std::log2(dim) + 1e-12);
  }
}

TEST(ShannonEntropy, ZeroTimesLogZero) {
  const std::vector<double> p = {0.5, 0.5, 0.0};
  EXPECT_NEAR(shannon_entropy_bits(p), 1.0, 1e-15);
}
