#pragma once

#include <span>

#include "dephase/statevec.hpp"

namespace dephase {

enum class MeasureKind { EntanglementEntropyBits, GlobalEntanglement, Purity, MeanExcitation };

struct MeasureResult {
  double value = 0.0;
  MeasureKind kind = MeasureKind::GlobalEntanglement;

  /// Checks the kind's admissible range for an n-qubit state (with 1e-9 slack).
  bool in_range(int n_qubits) const;
};

/// Entropy (bits) of either single-qubit marginal of a 2-qubit pure state.
double entanglement_entropy(const PureState& state);

/// Tr rho_i^2 for qubit i (0-based).
double qubit_purity(const PureState& state, int qubit);

/// Tr(rho_i |1><1|).
double mean_excitation(const PureState& state, int qubit);

/// Q = n - sum_i Tr rho_i^2, in [0, n/2].
double global_entanglement(const PureState& state);

/// Meyer-Wallach normalization 2Q/n, in [0, 1].
double global_entanglement_normalized(const PureState& state);

/**
 * Q for a generalized Dicke state from its excitation-support coefficients.
 *
 * `coeffs` are in increasing basis-index order, the order dicke_generalized
 * stores them. N = 1 (any n): Q = 2(1 - sum |c|^4). N = 2 (n = 4): the order is
 * c34, c24, c23, c14, c13, c12 (qubits numbered 1..4 from the most significant
 * bit) and Q = 2(1 - (|c12|^2-|c34|^2)^2 - (|c13|^2-|c24|^2)^2 - (|c14|^2-|c23|^2)^2).
 * Throws std::invalid_argument for any other (n, N).
 */
double dicke_q_closed_form(std::span<const cplx> coeffs, int n_qubits, int excitations);

MeasureResult measure(const PureState& state, MeasureKind kind, int qubit = 0);

}  // namespace dephase
