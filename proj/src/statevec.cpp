#include "dephase/statevec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace dephase {

namespace {

void check_qubit_count(int n) {
  if (n < 1 || n > 64) {
    throw std::invalid_argument("qubit count must be in [1, 64], got " + std::to_string(n));
  }
}

BasisIndex bit_of(int n_qubits, int qubit) {
  return BasisIndex{1} << (n_qubits - 1 - qubit);
}

void check_norm(std::span<const cplx> amplitudes) {
  double sum = 0.0;
  for (const cplx& a : amplitudes) sum += std::norm(a);
  if (std::abs(sum - 1.0) > tol::norm) {
    throw std::invalid_argument("state is not normalized: |psi|^2 = " + std::to_string(sum));
  }
}

}  // namespace

PureState PureState::dense(int n_qubits, std::vector<cplx> amplitudes) {
  check_qubit_count(n_qubits);
  if (n_qubits > kMaxDenseQubits) {
    throw std::invalid_argument("dense states are limited to " +
                                std::to_string(kMaxDenseQubits) + " qubits");
  }
  if (amplitudes.size() != (std::size_t{1} << n_qubits)) {
    throw std::invalid_argument("dense amplitude vector must have length 2^n");
  }
  check_norm(amplitudes);
  return PureState(n_qubits, true, {}, std::move(amplitudes));
}

PureState PureState::sparse(int n_qubits, std::vector<BasisIndex> support,
                            std::vector<cplx> amplitudes) {
  check_qubit_count(n_qubits);
  if (support.size() != amplitudes.size() || support.empty()) {
    throw std::invalid_argument("sparse state needs matching, nonempty support and amplitudes");
  }
  const BasisIndex last = n_qubits == 64 ? ~BasisIndex{0} : (BasisIndex{1} << n_qubits) - 1;
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (k > 0 && support[k] <= support[k - 1]) {
      throw std::invalid_argument("sparse support must be strictly increasing");
    }
    if (support[k] > last) throw std::invalid_argument("support index exceeds 2^n - 1");
    if (amplitudes[k] == cplx{}) throw std::invalid_argument("sparse state stores a zero amplitude");
  }
  check_norm(amplitudes);
  return PureState(n_qubits, false, std::move(support), std::move(amplitudes));
}

PureState PureState::from_support(int n_qubits, std::vector<BasisIndex> support,
                                  std::vector<cplx> amplitudes) {
  check_qubit_count(n_qubits);
  if (n_qubits > kSparseQubitThreshold && support.size() <= kMaxSparseSupport) {
    // Drop exact zeros so the sparse invariant holds.
    std::size_t w = 0;
    for (std::size_t k = 0; k < support.size(); ++k) {
      if (amplitudes[k] != cplx{}) {
        support[w] = support[k];
        amplitudes[w] = amplitudes[k];
        ++w;
      }
    }
    support.resize(w);
    amplitudes.resize(w);
    return sparse(n_qubits, std::move(support), std::move(amplitudes));
  }
  if (n_qubits > kMaxDenseQubits) {
    throw std::invalid_argument("support too large for a sparse state and n too large for dense");
  }
  std::vector<cplx> dense_amps(std::size_t{1} << n_qubits);
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (support[k] >= dense_amps.size()) throw std::invalid_argument("support index exceeds 2^n - 1");
    dense_amps[support[k]] = amplitudes[k];
  }
  return dense(n_qubits, std::move(dense_amps));
}

PureState PureState::basis(int n_qubits, BasisIndex index) {
  return from_support(n_qubits, {index}, {cplx{1.0, 0.0}});
}

double PureState::dimension() const { return std::ldexp(1.0, n_qubits_); }

cplx PureState::amplitude(BasisIndex index) const {
  if (dense_) return index < amplitudes_.size() ? amplitudes_[index] : cplx{};
  auto it = std::lower_bound(support_.begin(), support_.end(), index);
  if (it == support_.end() || *it != index) return {};
  return amplitudes_[static_cast<std::size_t>(it - support_.begin())];
}

double PureState::norm_squared() const {
  double sum = 0.0;
  for (const cplx& a : amplitudes_) sum += std::norm(a);
  return sum;
}

std::vector<cplx> PureState::to_dense() const {
  if (dense_) return amplitudes_;
  if (n_qubits_ > kMaxDenseQubits) throw std::length_error("state too large to densify");
  std::vector<cplx> out(std::size_t{1} << n_qubits_);
  for (std::size_t k = 0; k < support_.size(); ++k) out[support_[k]] = amplitudes_[k];
  return out;
}

Eigen::VectorXcd PureState::to_vector() const {
  const std::vector<cplx> d = to_dense();
  return Eigen::Map<const Eigen::VectorXcd>(d.data(), static_cast<Eigen::Index>(d.size()));
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw std::invalid_argument("density matrix must be square and nonempty");
  }
  const Eigen::Index d = entries_.rows();
  if ((d & (d - 1)) != 0) throw std::invalid_argument("density matrix dimension must be a power of 2");
  if (max_hermitian_defect(entries_) > tol::hermitian) {
    throw std::invalid_argument("density matrix is not Hermitian");
  }
  if (std::abs(entries_.trace() - cplx{1.0, 0.0}) > tol::trace) {
    throw std::invalid_argument("density matrix trace is not 1");
  }
  const auto eig = hermitian_eigenvalues(entries_);
  if (eig.back() < tol::eigen_floor) {
    throw std::invalid_argument("density matrix has a negative eigenvalue");
  }
}

DensityMatrix DensityMatrix::projector(const PureState& state) {
  const Eigen::VectorXcd v = state.to_vector();
  return unchecked(v * v.adjoint());
}

Eigen::Matrix2cd QubitMarginal::matrix() const {
  Eigen::Matrix2cd m;
  m << p0, coherence, std::conj(coherence), p1;
  return m;
}

PureState tensor(const PureState& a, const PureState& b) {
  const int n = a.n_qubits() + b.n_qubits();
  check_qubit_count(n);
  const int shift = b.n_qubits();
  std::vector<BasisIndex> support;
  std::vector<cplx> amps;
  support.reserve(a.stored_size() * b.stored_size());
  amps.reserve(a.stored_size() * b.stored_size());
  const auto a_amps = a.amplitudes();
  const auto b_amps = b.amplitudes();
  for (std::size_t i = 0; i < a_amps.size(); ++i) {
    const BasisIndex hi = a.index_at(i) << shift;
    for (std::size_t j = 0; j < b_amps.size(); ++j) {
      support.push_back(hi | b.index_at(j));
      amps.push_back(a_amps[i] * b_amps[j]);
    }
  }
  if (!a.is_sparse() && !b.is_sparse()) return PureState::dense(n, std::move(amps));
  return PureState::from_support(n, std::move(support), std::move(amps));
}

QubitMarginal qubit_marginal(const PureState& state, int qubit) {
  if (qubit < 0 || qubit >= state.n_qubits()) {
    throw std::out_of_range("qubit index " + std::to_string(qubit) + " out of range");
  }
  const BasisIndex bit = bit_of(state.n_qubits(), qubit);
  const auto amps = state.amplitudes();
  QubitMarginal m;
  if (!state.is_sparse()) {
    for (std::size_t j = 0; j < amps.size(); ++j) {
      if (j & bit) {
        m.p1 += std::norm(amps[j]);
      } else {
        m.p0 += std::norm(amps[j]);
        m.coherence += amps[j] * std::conj(amps[j | bit]);
      }
    }
    return m;
  }
  const auto support = state.support();
  for (std::size_t k = 0; k < amps.size(); ++k) {
    if (support[k] & bit) {
      m.p1 += std::norm(amps[k]);
    } else {
      m.p0 += std::norm(amps[k]);
      const cplx partner = state.amplitude(support[k] | bit);
      m.coherence += amps[k] * std::conj(partner);
    }
  }
  return m;
}

DensityMatrix reduce_to_qubit(const PureState& state, int qubit) {
  return DensityMatrix::unchecked(qubit_marginal(state, qubit).matrix());
}

double max_hermitian_defect(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXcd& m) {
  if (max_hermitian_defect(m) > tol::hermitian) {
    throw std::invalid_argument("matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("Hermitian eigensolver did not converge");
  }
  const Eigen::VectorXd& values = solver.eigenvalues();
  const Eigen::MatrixXcd& vectors = solver.eigenvectors();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    const double residual = (m * vectors.col(k) - values(k) * vectors.col(k)).norm();
    if (residual > tol::eigen_residual * scale) {
      throw NumericalError("eigenpair residual " + std::to_string(residual) + " exceeds tolerance");
    }
  }
  std::vector<double> out(values.data(), values.data() + values.size());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

std::vector<double> hermitian_eigenvalues(const DensityMatrix& rho) {
  return hermitian_eigenvalues(rho.matrix());
}

double shannon_entropy_bits(std::span<const double> probabilities) {
  double h = 0.0;
  for (double p : probabilities) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double von_neumann_entropy(const Eigen::MatrixXcd& rho) {
  std::vector<double> eig = hermitian_eigenvalues(rho);
  for (double& l : eig) {
    if (l < tol::eigen_floor) throw std::invalid_argument("negative eigenvalue in density matrix");
    l = std::clamp(l, 0.0, 1.0);
  }
  return shannon_entropy_bits(eig);
}

double von_neumann_entropy(const DensityMatrix& rho) { return von_neumann_entropy(rho.matrix()); }

}  // namespace dephase
