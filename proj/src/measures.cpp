#include "dephase/measures.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dephase {

namespace {
constexpr double kRangeSlack = 1e-9;
}

bool MeasureResult::in_range(int n_qubits) const {
  double lo = 0.0, hi = 0.0;
  switch (kind) {
    case MeasureKind::EntanglementEntropyBits: hi = 1.0; break;
    case MeasureKind::GlobalEntanglement: hi = 0.5 * n_qubits; break;
    case MeasureKind::Purity: lo = 0.5; hi = 1.0; break;
    case MeasureKind::MeanExcitation: hi = 1.0; break;
  }
  return value >= lo - kRangeSlack && value <= hi + kRangeSlack;
}

double entanglement_entropy(const PureState& state) {
  if (state.n_qubits() != 2) {
    throw std::invalid_argument("entanglement_entropy needs a 2-qubit state, got " +
                                std::to_string(state.n_qubits()));
  }
  const double s1 = von_neumann_entropy(reduce_to_qubit(state, 0));
  const double s2 = von_neumann_entropy(reduce_to_qubit(state, 1));
  if (std::abs(s1 - s2) > 1e-8) {
    throw NumericalError("marginal entropies of a pure state disagree");
  }
  return s1;
}

double qubit_purity(const PureState& state, int qubit) {
  return qubit_marginal(state, qubit).purity();
}

double mean_excitation(const PureState& state, int qubit) {
  return qubit_marginal(state, qubit).p1;
}

double global_entanglement(const PureState& state) {
  double total = 0.0;
  for (int q = 0; q < state.n_qubits(); ++q) total += qubit_marginal(state, q).purity();
  return state.n_qubits() - total;
}

double global_entanglement_normalized(const PureState& state) {
  return 2.0 * global_entanglement(state) / state.n_qubits();
}

double dicke_q_closed_form(std::span<const cplx> coeffs, int n_qubits, int excitations) {
  if (excitations == 1) {
    if (static_cast<int>(coeffs.size()) != n_qubits) {
      throw std::invalid_argument("N=1 Dicke state needs n coefficients");
    }
    double sum = 0.0;
    for (const cplx& c : coeffs) sum += std::norm(c) * std::norm(c);
    return 2.0 * (1.0 - sum);
  }
  if (excitations == 2 && n_qubits == 4) {
    if (coeffs.size() != 6) throw std::invalid_argument("N=2, n=4 Dicke state needs 6 coefficients");
    double p[6];
    std::transform(coeffs.begin(), coeffs.end(), p, [](const cplx& c) { return std::norm(c); });
    // p[k] and p[5-k] are complementary pairs (c34/c12, c24/c13, c23/c14).
    const double d1 = p[5] - p[0], d2 = p[4] - p[1], d3 = p[3] - p[2];
    return 2.0 * (1.0 - d1 * d1 - d2 * d2 - d3 * d3);
  }
  throw std::invalid_argument("no closed form for n=" + std::to_string(n_qubits) +
                              ", N=" + std::to_string(excitations));
}

MeasureResult measure(const PureState& state, MeasureKind kind, int qubit) {
  switch (kind) {
    case MeasureKind::EntanglementEntropyBits: return {entanglement_entropy(state), kind};
    case MeasureKind::GlobalEntanglement: return {global_entanglement(state), kind};
    case MeasureKind::Purity: return {qubit_purity(state, qubit), kind};
    case MeasureKind::MeanExcitation: return {mean_excitation(state, qubit), kind};
  }
  throw std::invalid_argument("unknown measure kind");
}

}  // namespace dephase
