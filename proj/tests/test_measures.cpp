#include <gtest/gtest.h>

#include <cmath>

#include "dephase/interaction.hpp"
#include "dephase/measures.hpp"
#include "dephase/sampling.hpp"
#include "oracles.hpp"

using namespace dephase;

namespace {

const double kR = 1.0 / std::sqrt(2.0);

PureState equal_dicke(int n, int big_n) {
  const auto support = dicke_support(n, big_n);
  const double a = 1.0 / std::sqrt(static_cast<double>(support.size()));
  return PureState::sparse(n, support, std::vector<cplx>(support.size(), cplx(a)));
}

PureState apply_local(const PureState& psi, const std::vector<Eigen::Matrix2cd>& u) {
  Eigen::MatrixXcd full = u[0];
  for (std::size_t k = 1; k < u.size(); ++k) {
    Eigen::MatrixXcd next(full.rows() * 2, full.cols() * 2);
    for (Eigen::Index i = 0; i < full.rows(); ++i)
      for (Eigen::Index j = 0; j < full.cols(); ++j) next.block(2 * i, 2 * j, 2, 2) = full(i, j) * u[k];
    full = next;
  }
  const Eigen::VectorXcd v = full * psi.to_vector();
  return PureState::dense(psi.n_qubits(), std::vector<cplx>(v.data(), v.data() + v.size()));
}

std::vector<cplx> support_coeffs(const PureState& psi, int big_n) {
  std::vector<cplx> c;
  for (BasisIndex j : dicke_support(psi.n_qubits(), big_n)) c.push_back(psi.amplitude(j));
  return c;
}

}  // namespace

TEST(EntanglementEntropy, Examples) {
  EXPECT_NEAR(entanglement_entropy(PureState::basis(2, 0)), 0.0, 1e-12);
  EXPECT_NEAR(entanglement_entropy(PureState::dense(2, {kR, 0, 0, kR})), 1.0, 1e-12);
  const PureState psi = PureState::dense(2, {std::sqrt(0.9), 0, 0, std::sqrt(0.1)});
  const double expected = oracle::entropy_bits({0.9, 0.1});
  EXPECT_NEAR(entanglement_entropy(psi), expected, 1e-12);
  EXPECT_NEAR(expected, 0.4690, 5e-5);
}

TEST(EntanglementEntropy, RejectsWrongQubitCount) {
  EXPECT_THROW(entanglement_entropy(PureState::basis(3, 0)), std::invalid_argument);
}

TEST(EntanglementEntropy, SymmetricInQubitChoice) {
  Rng rng(41, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const PureState psi = haar_state(2, rng);
    EXPECT_NEAR(von_neumann_entropy(reduce_to_qubit(psi, 0)), von_neumann_entropy(reduce_to_qubit(psi, 1)), 1e-9);
  }
}

TEST(GlobalEntanglement, Examples) {
  Rng rng(42, 0);
  EXPECT_NEAR(global_entanglement(separable_state(4, rng)), 0.0, 1e-9);
  EXPECT_NEAR(global_entanglement(PureState::dense(2, {kR, 0, 0, kR})), 1.0, 1e-12);
  EXPECT_NEAR(global_entanglement(equal_dicke(4, 1)), 1.5, 1e-12);
  EXPECT_NEAR(global_entanglement_normalized(PureState::dense(2, {kR, 0, 0, kR})), 1.0, 1e-12);
}

TEST(QubitPurity, ExamplesAndElementwiseOracle) {
  EXPECT_NEAR(qubit_purity(PureState::basis(3, 5), 1), 1.0, 1e-15);
  EXPECT_NEAR(qubit_purity(PureState::dense(2, {kR, 0, 0, kR}), 1), 0.5, 1e-15);
  Rng rng(43, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const PureState psi = haar_state(3, rng);
    const auto full = oracle::outer(psi.to_dense());
    for (int q = 0; q < 3; ++q) {
      const auto r = oracle::partial_trace_to_qubit(full, 3, q);
      double expected = 0.0;
      for (const auto& row : r)
        for (cplx x : row) expected += std::norm(x);
      EXPECT_NEAR(qubit_purity(psi, q), expected, 1e-14);
    }
  }
  EXPECT_THROW(qubit_purity(PureState::basis(2, 0), 2), std::out_of_range);
}

TEST(MeanExcitation, Examples) {
  EXPECT_NEAR(mean_excitation(PureState::basis(2, 0b10), 0), 1.0, 1e-15);
  EXPECT_NEAR(mean_excitation(PureState::basis(2, 0b10), 1), 0.0, 1e-15);
  EXPECT_NEAR(mean_excitation(PureState::dense(2, {kR, 0, 0, kR}), 1), 0.5, 1e-15);
  const PureState b = boundary_state_2q(0.2, 0.1);
  EXPECT_NEAR(mean_excitation(b, 0), 0.2, 1e-15);
  EXPECT_NEAR(mean_excitation(b, 1), 0.2, 1e-15);
  EXPECT_THROW(mean_excitation(b, 3), std::out_of_range);
}

TEST(MeanExcitation, EqualDickeIsNOverN) {
  for (int n = 2; n <= 8; ++n) {
    for (int big_n = 1; big_n < n; ++big_n) {
      const PureState psi = equal_dicke(n, big_n);
      for (int q = 0; q < n; ++q) EXPECT_NEAR(mean_excitation(psi, q), double(big_n) / n, 1e-9);
    }
  }
}

TEST(DickeClosedForm, SymmetricValues) {
  const std::vector<cplx> c4(4, cplx(0.5));
  EXPECT_NEAR(dicke_q_closed_form(c4, 4, 1), 1.5, 1e-12);
  const std::vector<cplx> c6(6, cplx(1.0 / std::sqrt(6.0)));
  EXPECT_NEAR(dicke_q_closed_form(c6, 4, 2), 2.0, 1e-12);
}

TEST(DickeClosedForm, MatchesDenseQ) {
  Rng rng(44, 0);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = trial % 3 == 0 ? 4 : 3 + trial % 7;
    const PureState psi = dicke_generalized(n, 1, rng);
    EXPECT_NEAR(dicke_q_closed_form(support_coeffs(psi, 1), n, 1), global_entanglement(psi), 1e-9);
    const PureState p2 = dicke_generalized(4, 2, rng);
    EXPECT_NEAR(dicke_q_closed_form(support_coeffs(p2, 2), 4, 2), global_entanglement(p2), 1e-9);
  }
}

TEST(DickeClosedForm, RejectsUnsupported) {
  const std::vector<cplx> c(10, cplx(1.0 / std::sqrt(10.0)));
  EXPECT_THROW(dicke_q_closed_form(c, 5, 2), std::invalid_argument);
  EXPECT_THROW(dicke_q_closed_form(c, 5, 3), std::invalid_argument);
}

TEST(Measure, KindsAndRanges) {
  Rng rng(45, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = trial % 5 + 2;
    const PureState psi = haar_state(n, rng);
    const auto q = measure(psi, MeasureKind::GlobalEntanglement);
    EXPECT_TRUE(q.in_range(n));
    EXPECT_NEAR(q.value, global_entanglement(psi), 1e-15);
    EXPECT_TRUE(measure(psi, MeasureKind::Purity, n - 1).in_range(n));
    EXPECT_TRUE(measure(psi, MeasureKind::MeanExcitation, 0).in_range(n));
    if (n == 2) {
      EXPECT_TRUE(measure(psi, MeasureKind::EntanglementEntropyBits).in_range(n));
    }
  }
}

// Properties.

TEST(MeasureProperties, QIsLocallyInvariant) {
  Rng rng(46, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = trial % 4 + 2;
    const PureState psi = haar_state(n, rng);
    std::vector<Eigen::Matrix2cd> u;
    for (int q = 0; q < n; ++q) u.push_back(random_su2(rng));
    EXPECT_NEAR(global_entanglement(apply_local(psi, u)), global_entanglement(psi), 1e-9);
  }
}

TEST(MeasureProperties, DickeQIgnoresPhases) {
  Rng rng(47, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const PureState psi = dicke_generalized(4, 2, rng);
    const std::vector<cplx> coeffs = support_coeffs(psi, 2);
    std::vector<cplx> amps = coeffs;
    for (auto& a : amps) a *= std::polar(1.0, rng.angle());
    const PureState rephased = PureState::sparse(4, dicke_support(4, 2), amps);
    EXPECT_NEAR(global_entanglement(rephased), global_entanglement(psi), 1e-9);
    EXPECT_NEAR(dicke_q_closed_form(amps, 4, 2), dicke_q_closed_form(coeffs, 4, 2), 1e-12);
  }
}

TEST(MeasureProperties, ClusterProductIsAdditive) {
  Rng rng(48, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const PureState a = haar_state(2, rng);
    const PureState b = haar_state(3, rng);
    const PureState ab = tensor(a, b);
    EXPECT_NEAR(global_entanglement(ab), global_entanglement(a) + global_entanglement(b), 1e-9);
    const double s = final_entropy(ab, InteractionSpec::distinct('z', 5));
    InteractionSpec sb = InteractionSpec::distinct('z', 5);
    sb.per_qubit.erase(sb.per_qubit.begin(), sb.per_qubit.begin() + 2);
    InteractionSpec sa_d = InteractionSpec::distinct('z', 5);
    sa_d.per_qubit.resize(2);
    EXPECT_NEAR(s, final_entropy(a, sa_d) + final_entropy(b, sb), 1e-9);
  }
}
