#include "dephase/interaction.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

namespace dephase {

namespace {

bool is_identity(const Eigen::Matrix2cd& m) {
  return (m - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() == 0.0;
}

double parse_number(std::string_view text, std::string_view token) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw std::invalid_argument("bad number in interaction token '" + std::string(token) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<QubitOperator> parse_token(std::string_view token) {
  token = trim(token);
  if (token.empty()) throw std::invalid_argument("empty interaction token");
  if (token == "i") return std::nullopt;
  if (token.find(':') != std::string_view::npos) {
    double c[4];
    std::size_t start = 0;
    for (int k = 0; k < 4; ++k) {
      const std::size_t end = k < 3 ? token.find(':', start) : token.size();
      if (end == std::string_view::npos) {
        throw std::invalid_argument("interaction token '" + std::string(token) +
                                    "' needs four ':'-separated coefficients");
      }
      c[k] = parse_number(token.substr(start, end - start), token);
      start = end + 1;
    }
    if (start <= token.size()) {
      throw std::invalid_argument("interaction token '" + std::string(token) + "' has extra fields");
    }
    return QubitOperator{c[0], c[1], c[2], c[3]};
  }
  const char axis = token.back();
  if (axis != 'x' && axis != 'y' && axis != 'z') {
    throw std::invalid_argument("unknown interaction token '" + std::string(token) + "'");
  }
  const std::string_view scale_text = token.substr(0, token.size() - 1);
  double scale = 1.0;
  if (scale_text == "-") {
    scale = -1.0;
  } else if (!scale_text.empty()) {
    scale = parse_number(scale_text, token);
  }
  switch (axis) {
    case 'x': return QubitOperator::sigma_x(scale);
    case 'y': return QubitOperator::sigma_y(scale);
    default: return QubitOperator::sigma_z(scale);
  }
}

/// Applies U^dagger to one qubit of a dense vector in place.
void apply_adjoint(std::vector<cplx>& v, int n_qubits, int qubit, const Eigen::Matrix2cd& u) {
  const std::size_t bit = std::size_t{1} << (n_qubits - 1 - qubit);
  const cplx a = std::conj(u(0, 0)), b = std::conj(u(1, 0));
  const cplx c = std::conj(u(0, 1)), d = std::conj(u(1, 1));
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (j & bit) continue;
    const cplx x0 = v[j];
    const cplx x1 = v[j | bit];
    v[j] = a * x0 + b * x1;
    v[j | bit] = c * x0 + d * x1;
  }
}

}  // namespace

double QubitOperator::pauli_norm() const { return std::sqrt(ax * ax + ay * ay + az * az); }

Eigen::Matrix2cd QubitOperator::matrix() const {
  Eigen::Matrix2cd m;
  m << cplx(a0 + az, 0.0), cplx(ax, -ay), cplx(ax, ay), cplx(a0 - az, 0.0);
  return m;
}

int InteractionSpec::interacting_count() const {
  return static_cast<int>(std::count_if(per_qubit.begin(), per_qubit.end(), [](const auto& op) {
    return op && op->pauli_norm() > 0.0;
  }));
}

double default_coupling_magnitude(int qubit) {
  static const std::vector<int> primes = [] {
    std::vector<int> out;
    for (int c = 2; out.size() < 64; ++c) {
      bool prime = true;
      for (int p : out) {
        if (p * p > c) break;
        if (c % p == 0) {
          prime = false;
          break;
        }
      }
      if (prime) out.push_back(c);
    }
    return out;
  }();
  if (qubit < 0 || qubit >= static_cast<int>(primes.size())) {
    throw std::out_of_range("no default coupling magnitude for qubit " + std::to_string(qubit));
  }
  return std::sqrt(static_cast<double>(primes[qubit]));
}

InteractionSpec InteractionSpec::distinct(char axis, int n_qubits, int interacting) {
  if (interacting < 0 || interacting > n_qubits) {
    throw std::invalid_argument("interacting qubit count must be in [0, n]");
  }
  InteractionSpec spec;
  spec.per_qubit.resize(static_cast<std::size_t>(n_qubits));
  for (int q = 0; q < interacting; ++q) {
    const double r = default_coupling_magnitude(q);
    switch (axis) {
      case 'x': spec.per_qubit[q] = QubitOperator::sigma_x(r); break;
      case 'y': spec.per_qubit[q] = QubitOperator::sigma_y(r); break;
      case 'z': spec.per_qubit[q] = QubitOperator::sigma_z(r); break;
      default: throw std::invalid_argument(std::string("unknown Pauli axis '") + axis + "'");
    }
  }
  return spec;
}

InteractionSpec parse_interaction(std::string_view text) {
  InteractionSpec spec;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = text.find(',', start);
    spec.per_qubit.push_back(parse_token(text.substr(start, end - start)));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return spec;
}

std::string format_interaction(const InteractionSpec& spec) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t q = 0; q < spec.per_qubit.size(); ++q) {
    if (q) out << ',';
    const auto& op = spec.per_qubit[q];
    if (!op) {
      out << 'i';
    } else if (op->a0 == 0.0 && op->ax == 0.0 && op->ay == 0.0) {
      out << op->az << 'z';
    } else if (op->a0 == 0.0 && op->ay == 0.0 && op->az == 0.0) {
      out << op->ax << 'x';
    } else if (op->a0 == 0.0 && op->ax == 0.0 && op->az == 0.0) {
      out << op->ay << 'y';
    } else {
      out << op->a0 << ':' << op->ax << ':' << op->ay << ':' << op->az;
    }
  }
  return out.str();
}

SingleQubitEigensystem single_qubit_eigensystem(const QubitOperator& op) {
  SingleQubitEigensystem es;
  const double r = op.pauli_norm();
  es.lambda_p = op.a0 + r;
  es.lambda_m = op.a0 - r;
  if (r == 0.0) return es;

  // Half-angle form: u_p = (cos(t/2), e^{i phi} sin(t/2)),
  // u_m = (sin(t/2), -e^{i phi} cos(t/2)).
  const double nz = std::clamp(op.az / r, -1.0, 1.0);
  const double c = std::sqrt(0.5 * (1.0 + nz));
  const double s = std::sqrt(0.5 * (1.0 - nz));
  const double rho = std::hypot(op.ax, op.ay);
  const cplx phase = rho > 0.0 ? cplx(op.ax / rho, op.ay / rho) : cplx(1.0, 0.0);
  Eigen::Vector2cd up(c, phase * s);
  Eigen::Vector2cd um(s, -phase * c);
  // First nonzero component real-positive.
  for (Eigen::Vector2cd* v : {&up, &um}) {
    const cplx lead = std::abs((*v)(0)) > 1e-15 ? (*v)(0) : (*v)(1);
    *v *= std::conj(lead) / std::abs(lead);
  }
  es.frame.col(0) = up;
  es.frame.col(1) = um;
  return es;
}

PointerBasis::PointerBasis(const InteractionSpec& spec) : tolerance_(spec.eigenvalue_tolerance) {
  const int n = spec.n_qubits();
  if (n < 1 || n > 64) throw std::invalid_argument("interaction spec needs 1..64 qubits");
  frames_.resize(static_cast<std::size_t>(n), Eigen::Matrix2cd::Identity());
  lambda_p_.assign(static_cast<std::size_t>(n), 0.0);
  lambda_m_.assign(static_cast<std::size_t>(n), 0.0);
  for (int q = 0; q < n; ++q) {
    const auto& op = spec.per_qubit[q];
    if (!op) continue;
    if (op->pauli_norm() == 0.0) {
      offset_ += op->a0;
      continue;
    }
    const SingleQubitEigensystem es = single_qubit_eigensystem(*op);
    frames_[q] = es.frame;
    lambda_p_[q] = es.lambda_p;
    lambda_m_[q] = es.lambda_m;
    identity_frames_ = identity_frames_ && is_identity(es.frame);
  }

  if (n <= kMaxCachedGroupQubits) {
    const std::size_t dim = std::size_t{1} << n;
    std::vector<BasisIndex> all(dim);
    std::iota(all.begin(), all.end(), BasisIndex{0});
    const auto classes = groups_over(all);
    labels_.resize(dim);
    for (std::size_t g = 0; g < classes.size(); ++g) {
      for (BasisIndex j : classes[g]) labels_[j] = static_cast<std::uint32_t>(g);
    }
    group_count_ = classes.size();
  }
}

double PointerBasis::eigenvalue(BasisIndex index) const {
  const int n = n_qubits();
  double a = offset_;
  for (int q = 0; q < n; ++q) {
    const bool one = (index >> (n - 1 - q)) & 1U;
    a += one ? lambda_m_[q] : lambda_p_[q];
  }
  return a;
}

std::vector<double> PointerBasis::eigenvalue_table() const {
  if (n_qubits() > kMaxDenseQubits) throw std::length_error("eigenvalue table too large");
  std::vector<double> out(std::size_t{1} << n_qubits());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = eigenvalue(j);
  return out;
}

std::vector<std::vector<BasisIndex>> PointerBasis::groups_over(
    std::span<const BasisIndex> indices) const {
  std::vector<std::pair<double, BasisIndex>> keyed;
  keyed.reserve(indices.size());
  for (BasisIndex j : indices) keyed.emplace_back(eigenvalue(j), j);
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::vector<BasisIndex>> out;
  for (std::size_t k = 0; k < keyed.size(); ++k) {
    const bool merge = k > 0 && keyed[k].first - keyed[k - 1].first <=
                                    tolerance_ * std::max(1.0, std::abs(keyed[k].first));
    if (!merge) out.emplace_back();
    out.back().push_back(keyed[k].second);
  }
  for (auto& g : out) std::sort(g.begin(), g.end());
  return out;
}

std::vector<std::vector<BasisIndex>> PointerBasis::groups() const {
  if (n_qubits() > kMaxDenseQubits) throw std::length_error("too many qubits to enumerate classes");
  if (!labels_.empty()) {
    std::vector<std::vector<BasisIndex>> out(group_count_);
    for (std::size_t j = 0; j < labels_.size(); ++j) out[labels_[j]].push_back(j);
    return out;
  }
  std::vector<BasisIndex> all(std::size_t{1} << n_qubits());
  std::iota(all.begin(), all.end(), BasisIndex{0});
  return groups_over(all);
}

std::vector<cplx> PointerBasis::coefficients(const PureState& state) const {
  if (state.n_qubits() != n_qubits()) {
    throw std::invalid_argument("state has " + std::to_string(state.n_qubits()) +
                                " qubits but the interaction has " + std::to_string(n_qubits()));
  }
  std::vector<cplx> c = state.to_dense();
  if (identity_frames_) return c;
  for (int q = 0; q < n_qubits(); ++q) {
    if (!is_identity(frames_[q])) apply_adjoint(c, n_qubits(), q, frames_[q]);
  }
  return c;
}

Eigen::MatrixXcd PointerBasis::frame_unitary() const {
  Eigen::MatrixXcd f = Eigen::MatrixXcd::Identity(1, 1);
  for (const auto& frame : frames_) {
    Eigen::MatrixXcd next(f.rows() * 2, f.cols() * 2);
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
      for (Eigen::Index j = 0; j < f.cols(); ++j) next.block<2, 2>(2 * i, 2 * j) = f(i, j) * frame;
    }
    f = std::move(next);
  }
  return f;
}

namespace {

void check_dense_map(const PureState& state, const PointerBasis& basis) {
  if (state.n_qubits() != basis.n_qubits()) {
    throw std::invalid_argument("state/interaction qubit count mismatch");
  }
  if (state.n_qubits() > 12) {
    throw std::length_error("dense density matrices are limited to 12 qubits");
  }
}

}  // namespace

DensityMatrix dephase_final(const PureState& state, const InteractionSpec& spec) {
  const PointerBasis basis(spec);
  check_dense_map(state, basis);
  const std::vector<cplx> c = basis.coefficients(state);
  const auto& label = basis.group_labels();
  const auto d = static_cast<Eigen::Index>(c.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = 0; k < d; ++k) {
      if (label[j] == label[k]) m(j, k) = c[j] * std::conj(c[k]);
    }
  }
  const Eigen::MatrixXcd f = basis.frame_unitary();
  return DensityMatrix::unchecked(f * m * f.adjoint());
}

DensityMatrix dephase_matrix(const DensityMatrix& rho, const InteractionSpec& spec) {
  const PointerBasis basis(spec);
  if (rho.dim() != (Eigen::Index{1} << basis.n_qubits())) {
    throw std::invalid_argument("density matrix dimension does not match the interaction");
  }
  const Eigen::MatrixXcd f = basis.frame_unitary();
  Eigen::MatrixXcd m = f.adjoint() * rho.matrix() * f;
  const auto& label = basis.group_labels();
  for (Eigen::Index j = 0; j < m.rows(); ++j) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      if (label[j] != label[k]) m(j, k) = 0.0;
    }
  }
  return DensityMatrix::unchecked(f * m * f.adjoint());
}

double final_entropy(const PureState& state, const PointerBasis& basis) {
  if (state.n_qubits() != basis.n_qubits()) {
    throw std::invalid_argument("state/interaction qubit count mismatch");
  }
  // Each diagonal block of |c><c| is the rank-1 matrix c_g c_g^dagger, whose
  // only nonzero eigenvalue is |c_g|^2: the spectrum is the class weights.
  if (state.is_sparse() && basis.identity_frames()) {
    const auto amps = state.amplitudes();
    const auto classes = basis.groups_over(state.support());
    std::vector<double> weights;
    weights.reserve(classes.size());
    for (const auto& g : classes) {
      double w = 0.0;
      for (BasisIndex j : g) {
        const auto pos = std::lower_bound(state.support().begin(), state.support().end(), j);
        w += std::norm(amps[static_cast<std::size_t>(pos - state.support().begin())]);
      }
      weights.push_back(w);
    }
    return shannon_entropy_bits(weights);
  }
  const std::vector<cplx> c = basis.coefficients(state);
  if (!basis.group_labels().empty()) {
    std::vector<double> weights(basis.group_count(), 0.0);
    const auto& label = basis.group_labels();
    for (std::size_t j = 0; j < c.size(); ++j) weights[label[j]] += std::norm(c[j]);
    return shannon_entropy_bits(weights);
  }
  std::vector<BasisIndex> nonzero;
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (c[j] != cplx{}) nonzero.push_back(j);
  }
  std::vector<double> weights;
  for (const auto& g : basis.groups_over(nonzero)) {
    double w = 0.0;
    for (BasisIndex j : g) w += std::norm(c[j]);
    weights.push_back(w);
  }
  return shannon_entropy_bits(weights);
}

double final_entropy(const PureState& state, const InteractionSpec& spec) {
  return final_entropy(state, PointerBasis(spec));
}

double EvolutionParams::boltzmann_ratio() const { return std::exp(-beta * omega); }

void EvolutionParams::validate() const {
  if (!(beta > 0.0) || !(omega > 0.0)) throw std::invalid_argument("beta and omega must be positive");
  if (mode == Mode::ContinuumCutoff && (!nu_cutoff || !(*nu_cutoff > 0.0))) {
    throw std::invalid_argument("continuum-cutoff mode requires a positive nu_cutoff");
  }
}

cplx decoherence_factor(double t, double delta, const EvolutionParams& params) {
  params.validate();
  const double phase_rate = t * delta;
  if (phase_rate == 0.0) return {1.0, 0.0};
  if (params.mode == EvolutionParams::Mode::ExactSeries) {
    const double q = params.boltzmann_ratio();
    return (1.0 - q) / (1.0 - q * std::exp(cplx(0.0, phase_rate)));
  }
  // Normalized integral of exp(-a nu) exp(i b nu) over [0, nu_c].
  const double a = params.beta * params.omega;
  const double nu_c = *params.nu_cutoff;
  const cplx z(-a, phase_rate);
  const cplx integral = (std::exp(z * nu_c) - 1.0) / z;
  const double norm = -std::expm1(-a * nu_c) / a;
  return integral / norm;
}

DensityMatrix evolve(const PureState& state, const InteractionSpec& spec, double t,
                     const EvolutionParams& params) {
  params.validate();
  const PointerBasis basis(spec);
  check_dense_map(state, basis);
  const std::vector<cplx> c = basis.coefficients(state);
  const std::vector<double> a = basis.eigenvalue_table();
  const auto& label = basis.group_labels();
  const auto d = static_cast<Eigen::Index>(c.size());
  Eigen::MatrixXcd m(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = 0; k < d; ++k) {
      const cplx factor = label[j] == label[k] ? cplx{1.0, 0.0}
                                               : decoherence_factor(t, a[k] - a[j], params);
      m(j, k) = c[j] * std::conj(c[k]) * factor;
    }
  }
  const Eigen::MatrixXcd f = basis.frame_unitary();
  return DensityMatrix::unchecked(f * m * f.adjoint());
}

}  // namespace dephase
