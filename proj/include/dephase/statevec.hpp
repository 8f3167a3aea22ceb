#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace dephase {

using cplx = std::complex<double>;
using BasisIndex = std::uint64_t;

/// Numerical tolerances shared by the whole library.
namespace tol {
inline constexpr double norm = 1e-10;
inline constexpr double hermitian = 1e-10;
inline constexpr double trace = 1e-10;
inline constexpr double eigen_floor = -1e-9;
inline constexpr double eigen_residual = 1e-8;
}  // namespace tol

/// Largest qubit count for which a dense amplitude vector is materialized.
inline constexpr int kMaxDenseQubits = 24;
/// Automatic sparse representation: above this qubit count ...
inline constexpr int kSparseQubitThreshold = 12;
/// ... and with at most this many nonzero amplitudes.
inline constexpr std::size_t kMaxSparseSupport = std::size_t{1} << 16;

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Normalized pure state of n qubits.
 *
 * Basis ordering is |q_0 q_1 ... q_{n-1}> with qubit 0 as the most significant
 * bit of the computational-basis index. Amplitudes are stored densely (2^n
 * entries) or sparsely as (strictly increasing index, nonzero amplitude) pairs.
 */
class PureState {
 public:
  static PureState dense(int n_qubits, std::vector<cplx> amplitudes);
  static PureState sparse(int n_qubits, std::vector<BasisIndex> support,
                          std::vector<cplx> amplitudes);
  /// Picks sparse storage when n > 12 and the support fits in 2^16 entries.
  static PureState from_support(int n_qubits, std::vector<BasisIndex> support,
                                std::vector<cplx> amplitudes);
  static PureState basis(int n_qubits, BasisIndex index);

  int n_qubits() const { return n_qubits_; }
  bool is_sparse() const { return !dense_; }
  /// 2^n as a double; exact for n < 1024.
  double dimension() const;
  std::size_t stored_size() const { return amplitudes_.size(); }

  /// Stored amplitudes; for dense states index j is basis state j.
  std::span<const cplx> amplitudes() const { return amplitudes_; }
  /// Basis indices of the stored amplitudes (sparse only; empty when dense).
  std::span<const BasisIndex> support() const { return support_; }
  BasisIndex index_at(std::size_t k) const { return dense_ ? k : support_[k]; }

  cplx amplitude(BasisIndex index) const;
  double norm_squared() const;
  std::vector<cplx> to_dense() const;
  Eigen::VectorXcd to_vector() const;

 private:
  PureState(int n, bool dense, std::vector<BasisIndex> support,
            std::vector<cplx> amplitudes)
      : n_qubits_(n),
        dense_(dense),
        support_(std::move(support)),
        amplitudes_(std::move(amplitudes)) {}

  int n_qubits_;
  bool dense_;
  std::vector<BasisIndex> support_;
  std::vector<cplx> amplitudes_;
};

/// Hermitian, positive semidefinite, unit-trace matrix.
class DensityMatrix {
 public:
  /// Validates Hermiticity, trace and spectrum; throws std::invalid_argument.
  explicit DensityMatrix(Eigen::MatrixXcd entries);

  static DensityMatrix projector(const PureState& state);
  /// Skips validation; for producers whose output is a density matrix by
  /// construction (dephasing maps, partial traces).
  static DensityMatrix unchecked(Eigen::MatrixXcd entries) {
    DensityMatrix rho;
    rho.entries_ = std::move(entries);
    return rho;
  }

  Eigen::Index dim() const { return entries_.rows(); }
  const Eigen::MatrixXcd& matrix() const { return entries_; }
  cplx operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

 private:
  DensityMatrix() = default;

  Eigen::MatrixXcd entries_;
};

/// Single-qubit reduced state [[p0, coherence], [conj(coherence), p1]].
struct QubitMarginal {
  double p0 = 0.0;
  double p1 = 0.0;
  cplx coherence{};

  double purity() const { return p0 * p0 + p1 * p1 + 2.0 * std::norm(coherence); }
  Eigen::Matrix2cd matrix() const;
};

PureState tensor(const PureState& a, const PureState& b);

QubitMarginal qubit_marginal(const PureState& state, int qubit);

/// Reduced state of one qubit (0-based); traces over every other qubit.
DensityMatrix reduce_to_qubit(const PureState& state, int qubit);

/// Eigenvalues of a Hermitian matrix in descending order.
std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXcd& m);
std::vector<double> hermitian_eigenvalues(const DensityMatrix& rho);

/// -sum p log2 p with 0 log 0 = 0.
double shannon_entropy_bits(std::span<const double> probabilities);

/// Von Neumann entropy in bits.
double von_neumann_entropy(const DensityMatrix& rho);
/// Same, for a raw matrix; rejects non-Hermitian input.
double von_neumann_entropy(const Eigen::MatrixXcd& rho);

double max_hermitian_defect(const Eigen::MatrixXcd& m);

}  // namespace dephase
