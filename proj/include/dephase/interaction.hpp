#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dephase/statevec.hpp"

namespace dephase {

/// One qubit's coupling a0*I + ax*X + ay*Y + az*Z.
struct QubitOperator {
  double a0 = 0.0;
  double ax = 0.0;
  double ay = 0.0;
  double az = 0.0;

  static QubitOperator sigma_x(double scale = 1.0) { return {0.0, scale, 0.0, 0.0}; }
  static QubitOperator sigma_y(double scale = 1.0) { return {0.0, 0.0, scale, 0.0}; }
  static QubitOperator sigma_z(double scale = 1.0) { return {0.0, 0.0, 0.0, scale}; }

  double pauli_norm() const;
  Eigen::Matrix2cd matrix() const;
};

/// Coupling of each qubit; std::nullopt marks an isolated qubit.
struct InteractionSpec {
  std::vector<std::optional<QubitOperator>> per_qubit;
  double eigenvalue_tolerance = 1e-9;

  int n_qubits() const { return static_cast<int>(per_qubit.size()); }
  /// Qubits whose coupling has a nonzero Pauli vector.
  int interacting_count() const;

  /// First `interacting` qubits coupled along `axis` ('x', 'y' or 'z') with
  /// pairwise-distinct magnitudes (default_coupling_magnitude), rest isolated.
  static InteractionSpec distinct(char axis, int n_qubits, int interacting);
  static InteractionSpec distinct(char axis, int n_qubits) {
    return distinct(axis, n_qubits, n_qubits);
  }
};

/**
 * Magnitude used for qubit k by InteractionSpec::distinct: sqrt of the k-th
 * prime. Square roots of distinct primes are linearly independent over the
 * rationals, so no two signed sums coincide and every A_S eigenvalue is
 * distinct for any n.
 */
double default_coupling_magnitude(int qubit);

/// Parses `z,2z,i,0:0:0:1`; throws std::invalid_argument on malformed text.
InteractionSpec parse_interaction(std::string_view text);
std::string format_interaction(const InteractionSpec& spec);

struct SingleQubitEigensystem {
  double lambda_p = 0.0;
  double lambda_m = 0.0;
  /// Columns are (u_p, u_m).
  Eigen::Matrix2cd frame = Eigen::Matrix2cd::Identity();
};

SingleQubitEigensystem single_qubit_eigensystem(const QubitOperator& op);

inline constexpr int kMaxCachedGroupQubits = 20;

/**
 * Eigenbasis of A_S = sum_i A_i: a product of single-qubit frames, with
 * eigenvalue a_j = sum over coupled qubits of lambda_p (bit 0) or lambda_m
 * (bit 1) of the pointer index j.
 */
class PointerBasis {
 public:
  explicit PointerBasis(const InteractionSpec& spec);

  int n_qubits() const { return static_cast<int>(frames_.size()); }
  const std::vector<Eigen::Matrix2cd>& frames() const { return frames_; }
  double tolerance() const { return tolerance_; }
  bool identity_frames() const { return identity_frames_; }

  /// a_j, computed additively (valid for any n).
  double eigenvalue(BasisIndex index) const;
  /// Dense table of a_j; only for n <= kMaxDenseQubits.
  std::vector<double> eigenvalue_table() const;

  /// Equal-eigenvalue classes over all 2^n indices (n <= kMaxDenseQubits).
  std::vector<std::vector<BasisIndex>> groups() const;
  /// Same classes restricted to `indices`.
  std::vector<std::vector<BasisIndex>> groups_over(std::span<const BasisIndex> indices) const;

  /// Class label of each index, cached for n <= kMaxCachedGroupQubits.
  const std::vector<std::uint32_t>& group_labels() const { return labels_; }
  std::size_t group_count() const { return group_count_; }

  /// Pointer-basis coefficients c_j (dense, n <= kMaxDenseQubits).
  std::vector<cplx> coefficients(const PureState& state) const;
  /// Full frame unitary F = frame_0 (x) ... (x) frame_{n-1}; psi = F c.
  Eigen::MatrixXcd frame_unitary() const;

 private:
  std::vector<Eigen::Matrix2cd> frames_;
  std::vector<double> lambda_p_;
  std::vector<double> lambda_m_;
  double offset_ = 0.0;
  double tolerance_;
  bool identity_frames_ = true;
  std::vector<std::uint32_t> labels_;
  std::size_t group_count_ = 0;
};

inline PointerBasis build_pointer_basis(const InteractionSpec& spec) { return PointerBasis(spec); }

/// Final (t -> infinity) state: coherences between distinct eigenvalue
/// classes removed. Dense; intended for n <= 10.
DensityMatrix dephase_final(const PureState& state, const InteractionSpec& spec);
/// Applies the same class mask to an existing density matrix.
DensityMatrix dephase_matrix(const DensityMatrix& rho, const InteractionSpec& spec);

/// Von Neumann entropy of dephase_final(state, spec), via class weights.
double final_entropy(const PureState& state, const PointerBasis& basis);
double final_entropy(const PureState& state, const InteractionSpec& spec);

struct EvolutionParams {
  enum class Mode { ExactSeries, ContinuumCutoff };

  double beta = 1.0;
  double omega = 1.0;
  Mode mode = Mode::ExactSeries;
  std::optional<double> nu_cutoff;

  double boltzmann_ratio() const;  // q = exp(-beta*omega)
  void validate() const;
};

/// Thermal average sum_nu lambda_nu exp(i t nu delta).
cplx decoherence_factor(double t, double delta, const EvolutionParams& params);

/// rho_S(t) with pointer-basis entries c_j c_k^* f(t, a_k - a_j).
DensityMatrix evolve(const PureState& state, const InteractionSpec& spec, double t,
                     const EvolutionParams& params);

}  // namespace dephase
