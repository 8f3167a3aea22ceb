#include "dephase/sampling.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace dephase {

namespace {

std::uint32_t lo32(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
std::uint32_t hi32(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

double parse_double(std::string_view text, std::string_view context) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("bad number '" + std::string(text) + "' in " + std::string(context));
  }
  return v;
}

int parse_int(std::string_view text, std::string_view context) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("bad integer '" + std::string(text) + "' in " + std::string(context));
  }
  return v;
}

std::uint64_t binomial(int n, int k) {
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return r;
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{lo32(seed), hi32(seed), lo32(stream), hi32(stream)};
  engine_.seed(seq);
}

double Rng::angle() { return 2.0 * std::numbers::pi * uniform(); }

void fill_haar_moduli(std::span<double> moduli, Rng& rng) {
  const std::size_t dim = moduli.size();
  if (dim == 0) throw std::invalid_argument("Haar vector needs dimension >= 1");
  // Component m carries prod_{k=dim-m}^{dim-1} sin(t_k) * cos(t_{dim-1-m}),
  // with sin(t_k) = xi_k^{1/(2k)}.
  double running = 1.0;
  for (std::size_t m = 0; m + 1 < dim; ++m) {
    const std::size_t k = dim - 1 - m;
    const double xi = rng.uniform();
    const double s = k == 1 ? std::sqrt(xi) : k == 2 ? std::sqrt(std::sqrt(xi))
                                                     : std::pow(xi, 0.5 / static_cast<double>(k));
    const double c = std::sqrt(std::max(0.0, 1.0 - s * s));
    moduli[m] = running * c;
    running *= s;
  }
  moduli[dim - 1] = running;
}

std::vector<double> haar_moduli(std::size_t dim, Rng& rng) {
  std::vector<double> moduli(dim);
  fill_haar_moduli(moduli, rng);
  return moduli;
}

std::vector<cplx> attach_haar_phases(std::span<const double> moduli, Rng& rng) {
  std::vector<cplx> out(moduli.size());
  if (!moduli.empty()) out[0] = moduli[0];
  for (std::size_t m = 1; m < moduli.size(); ++m) out[m] = std::polar(moduli[m], rng.angle());
  return out;
}

std::vector<cplx> haar_amplitudes(std::size_t dim, Rng& rng) {
  const std::vector<double> moduli = haar_moduli(dim, rng);
  return attach_haar_phases(moduli, rng);
}

PureState haar_state(int n_qubits, Rng& rng) {
  if (n_qubits < 1 || n_qubits > kMaxDenseQubits) {
    throw std::invalid_argument("Haar states need 1 <= n <= " + std::to_string(kMaxDenseQubits));
  }
  return PureState::dense(n_qubits, haar_amplitudes(std::size_t{1} << n_qubits, rng));
}

Eigen::Matrix2cd random_su2(Rng& rng) {
  const std::vector<cplx> col = haar_amplitudes(2, rng);
  const cplx global = std::polar(1.0, rng.angle());
  const cplx a = col[0] * global;
  const cplx b = col[1] * global;
  Eigen::Matrix2cd u;
  u << a, -std::conj(b), b, std::conj(a);
  return u;
}

PureState separable_state(int n_qubits, Rng& rng) {
  if (n_qubits < 1 || n_qubits > kMaxDenseQubits) {
    throw std::invalid_argument("separable states need 1 <= n <= " + std::to_string(kMaxDenseQubits));
  }
  std::vector<cplx> amps{cplx{1.0, 0.0}};
  for (int q = 0; q < n_qubits; ++q) {
    const Eigen::Matrix2cd u = random_su2(rng);
    const cplx a = u(0, 0), b = u(1, 0);
    std::vector<cplx> next(amps.size() * 2);
    for (std::size_t j = 0; j < amps.size(); ++j) {
      next[2 * j] = amps[j] * a;
      next[2 * j + 1] = amps[j] * b;
    }
    amps = std::move(next);
  }
  return PureState::dense(n_qubits, std::move(amps));
}

PureState cluster_state(std::span<const int> partition, Rng& rng) {
  if (partition.empty()) throw std::invalid_argument("empty cluster partition");
  for (int size : partition) {
    if (size < 1) throw std::invalid_argument("cluster sizes must be positive");
  }
  PureState state = haar_state(partition[0], rng);
  for (std::size_t k = 1; k < partition.size(); ++k) state = tensor(state, haar_state(partition[k], rng));
  return state;
}

PureState boundary_state_2q(double energy, double x) {
  constexpr double slack = 1e-12;
  if (!(energy >= 0.0 && energy <= 1.0)) throw std::invalid_argument("E must lie in [0, 1]");
  if (!(x >= -slack && x <= std::min(energy, 1.0 - energy) + slack)) {
    throw std::invalid_argument("x must lie in [0, min(E, 1-E)]");
  }
  const double xc = std::clamp(x, 0.0, std::min(energy, 1.0 - energy));
  return PureState::dense(2, {std::sqrt(std::max(0.0, 1.0 - xc - energy)), std::sqrt(xc),
                              std::sqrt(xc), std::sqrt(std::max(0.0, energy - xc))});
}

std::vector<BasisIndex> dicke_support(int n_qubits, int excitations) {
  if (n_qubits < 2 || n_qubits > 64) throw std::invalid_argument("Dicke states need 2 <= n <= 64");
  if (excitations < 1 || excitations > n_qubits - 1) {
    throw std::invalid_argument("excitation number must satisfy 1 <= N <= n-1");
  }
  const std::uint64_t size = binomial(n_qubits, excitations);
  if (n_qubits > kMaxDenseQubits && size > kMaxSparseSupport) {
    throw std::invalid_argument("Dicke support of " + std::to_string(size) + " states is too large");
  }
  std::vector<BasisIndex> out;
  out.reserve(size);
  // Gosper's hack: next larger integer with the same popcount.
  BasisIndex x = (BasisIndex{1} << excitations) - 1;
  for (std::uint64_t k = 0; k < size; ++k) {
    out.push_back(x);
    if (k + 1 == size) break;
    const BasisIndex c = x & (~x + 1);
    const BasisIndex r = x + c;
    x = (((r ^ x) >> 2) / c) | r;
  }
  return out;
}

PureState dicke_generalized(int n_qubits, int excitations, Rng& rng) {
  std::vector<BasisIndex> support = dicke_support(n_qubits, excitations);
  std::vector<cplx> amps = haar_amplitudes(support.size(), rng);
  return PureState::from_support(n_qubits, std::move(support), std::move(amps));
}

PureState pin_occupations(const PureState& state, double energy, double tolerance) {
  if (!(energy > 0.0 && energy < 1.0)) throw std::invalid_argument("pinning needs 0 < E < 1");
  if (state.is_sparse()) throw std::invalid_argument("pin_occupations needs a dense state");
  const int n = state.n_qubits();
  const auto amps = state.amplitudes();
  std::vector<double> w(amps.size());
  std::transform(amps.begin(), amps.end(), w.begin(), [](const cplx& a) { return std::norm(a); });

  constexpr int kMaxSweeps = 100000;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double worst = 0.0;
    for (int q = 0; q < n; ++q) {
      const std::size_t bit = std::size_t{1} << (n - 1 - q);
      double m1 = 0.0, m0 = 0.0;
      for (std::size_t j = 0; j < w.size(); ++j) (j & bit ? m1 : m0) += w[j];
      if (m1 <= 0.0 || m0 <= 0.0) {
        throw std::invalid_argument("cannot pin a qubit with a deterministic occupation");
      }
      worst = std::max(worst, std::abs(m1 / (m0 + m1) - energy));
      const double up = energy / m1, down = (1.0 - energy) / m0;
      for (std::size_t j = 0; j < w.size(); ++j) w[j] *= (j & bit) ? up : down;
    }
    if (worst <= tolerance) {
      std::vector<cplx> out(amps.size());
      for (std::size_t j = 0; j < w.size(); ++j) {
        const double mod = std::abs(amps[j]);
        out[j] = mod > 0.0 ? amps[j] * (std::sqrt(w[j]) / mod) : cplx{};
      }
      double norm = 0.0;
      for (const cplx& a : out) norm += std::norm(a);
      for (cplx& a : out) a /= std::sqrt(norm);
      return PureState::dense(n, std::move(out));
    }
  }
  throw NumericalError("occupation pinning did not converge");
}

double default_energy_delta(int n_qubits) { return n_qubits <= 2 ? 0.01 : 0.02; }

EnergyConstrainedSampler::EnergyConstrainedSampler(int n_qubits, double energy, double delta,
                                                   std::uint64_t max_attempts, bool pin)
    : n_qubits_(n_qubits), energy_(energy), delta_(delta), max_attempts_(max_attempts), pin_(pin) {
  if (n_qubits < 1 || n_qubits > 16) throw std::invalid_argument("energy ensemble needs 1 <= n <= 16");
  if (!(energy >= 0.0 && energy <= 1.0)) throw std::invalid_argument("E must lie in [0, 1]");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (max_attempts == 0) throw std::invalid_argument("max_attempts must be positive");
}

PureState EnergyConstrainedSampler::draw(Rng& rng) {
  const std::size_t dim = std::size_t{1} << n_qubits_;
  std::vector<double> moduli(dim);
  std::vector<double> excitation(static_cast<std::size_t>(n_qubits_));
  for (std::uint64_t tries = 0; tries < max_attempts_; ++tries) {
    ++attempts_;
    // Phases are independent of the moduli, so only accepted draws need them.
    fill_haar_moduli(moduli, rng);
    std::fill(excitation.begin(), excitation.end(), 0.0);
    for (std::size_t j = 1; j < dim; ++j) {
      const double w = moduli[j] * moduli[j];
      for (int q = 0; q < n_qubits_; ++q) {
        if ((j >> (n_qubits_ - 1 - q)) & 1U) excitation[q] += w;
      }
    }
    const bool ok = std::all_of(excitation.begin(), excitation.end(),
                                [&](double v) { return std::abs(v - energy_) <= delta_; });
    if (!ok) continue;
    ++accepted_;
    PureState state = PureState::dense(n_qubits_, attach_haar_phases(moduli, rng));
    return pin_ ? pin_occupations(state, energy_) : state;
  }
  std::ostringstream msg;
  msg << "energy-constrained sampler (n=" << n_qubits_ << ", E=" << energy_ << ", delta=" << delta_
      << ") rejected " << max_attempts_ << " consecutive draws; acceptance rate so far "
      << acceptance_rate();
  throw SamplerInfeasible(msg.str(), attempts_, accepted_);
}

double EnergyConstrainedSampler::acceptance_rate() const {
  return attempts_ == 0 ? 0.0 : static_cast<double>(accepted_) / static_cast<double>(attempts_);
}

PureState energy_constrained(int n_qubits, double energy, double delta, Rng& rng) {
  EnergyConstrainedSampler sampler(n_qubits, energy, delta);
  return sampler.draw(rng);
}

void EnsembleSpec::validate() const {
  if (n_qubits < 1) throw std::invalid_argument("ensemble needs n >= 1");
  if (count < 1) throw std::invalid_argument("sample count must be >= 1");
  switch (kind) {
    case Kind::Haar:
    case Kind::Separable:
      if (n_qubits > kMaxDenseQubits) throw std::invalid_argument("too many qubits for a dense ensemble");
      break;
    case Kind::Clusters: {
      const int total = std::accumulate(partition.begin(), partition.end(), 0);
      if (partition.empty() || total != n_qubits) {
        throw std::invalid_argument("cluster partition must sum to the qubit count");
      }
      for (int s : partition) {
        if (s < 1) throw std::invalid_argument("cluster sizes must be positive");
      }
      break;
    }
    case Kind::EnergyConstrained:
      if (!(energy >= 0.0 && energy <= 1.0)) throw std::invalid_argument("E must lie in [0, 1]");
      if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
      if (pin && !(energy > 0.0 && energy < 1.0)) throw std::invalid_argument("exact pinning needs 0 < E < 1");
      break;
    case Kind::Dicke:
      if (excitations < 1 || excitations > n_qubits - 1) {
        throw std::invalid_argument("Dicke excitation number must satisfy 1 <= N <= n-1");
      }
      break;
  }
}

EnsembleSpec parse_ensemble(std::string_view text, int n_qubits) {
  EnsembleSpec spec;
  spec.n_qubits = n_qubits;
  const std::size_t eq = text.find('=');
  const std::string_view head = text.substr(0, eq);
  const std::string_view tail = eq == std::string_view::npos ? std::string_view{} : text.substr(eq + 1);
  if (head == "haar" && eq == std::string_view::npos) {
    spec.kind = EnsembleSpec::Kind::Haar;
  } else if (head == "separable" && eq == std::string_view::npos) {
    spec.kind = EnsembleSpec::Kind::Separable;
  } else if (head == "clusters" && !tail.empty()) {
    spec.kind = EnsembleSpec::Kind::Clusters;
    std::size_t start = 0;
    while (true) {
      const std::size_t end = tail.find('+', start);
      spec.partition.push_back(parse_int(tail.substr(start, end - start), text));
      if (end == std::string_view::npos) break;
      start = end + 1;
    }
  } else if (head == "energy" && !tail.empty()) {
    spec.kind = EnsembleSpec::Kind::EnergyConstrained;
    const std::size_t c1 = tail.find(':');
    spec.energy = parse_double(tail.substr(0, c1), text);
    spec.delta = default_energy_delta(n_qubits);
    if (c1 != std::string_view::npos) {
      const std::string_view rest = tail.substr(c1 + 1);
      const std::size_t c2 = rest.find(':');
      spec.delta = parse_double(rest.substr(0, c2), text);
      if (c2 != std::string_view::npos) {
        if (rest.substr(c2 + 1) != "exact") {
          throw std::invalid_argument("unknown energy ensemble option in '" + std::string(text) + "'");
        }
        spec.pin = true;
      }
    }
  } else if (head == "dicke" && !tail.empty()) {
    spec.kind = EnsembleSpec::Kind::Dicke;
    spec.excitations = parse_int(tail, text);
  } else {
    throw std::invalid_argument("unknown ensemble '" + std::string(text) + "'");
  }
  spec.validate();
  return spec;
}

std::string format_ensemble(const EnsembleSpec& spec) {
  std::ostringstream out;
  out.precision(17);
  switch (spec.kind) {
    case EnsembleSpec::Kind::Haar: out << "haar"; break;
    case EnsembleSpec::Kind::Separable: out << "separable"; break;
    case EnsembleSpec::Kind::Clusters:
      out << "clusters=";
      for (std::size_t k = 0; k < spec.partition.size(); ++k) out << (k ? "+" : "") << spec.partition[k];
      break;
    case EnsembleSpec::Kind::EnergyConstrained:
      out << "energy=" << spec.energy << ':' << spec.delta << (spec.pin ? ":exact" : "");
      break;
    case EnsembleSpec::Kind::Dicke: out << "dicke=" << spec.excitations; break;
  }
  return out.str();
}

EnsembleSampler::EnsembleSampler(EnsembleSpec spec)
    : spec_((spec.validate(), std::move(spec))),
      energy_(spec_.kind == EnsembleSpec::Kind::EnergyConstrained ? spec_.n_qubits : 1,
              spec_.energy, spec_.delta, spec_.max_attempts, spec_.pin) {
  if (spec_.kind == EnsembleSpec::Kind::Dicke) {
    dicke_support_ = dicke_support(spec_.n_qubits, spec_.excitations);
  }
}

PureState EnsembleSampler::draw(Rng& rng) {
  switch (spec_.kind) {
    case EnsembleSpec::Kind::Haar: ++draws_; return haar_state(spec_.n_qubits, rng);
    case EnsembleSpec::Kind::Separable: ++draws_; return separable_state(spec_.n_qubits, rng);
    case EnsembleSpec::Kind::Clusters: ++draws_; return cluster_state(spec_.partition, rng);
    case EnsembleSpec::Kind::EnergyConstrained: return energy_.draw(rng);
    case EnsembleSpec::Kind::Dicke: {
      ++draws_;
      std::vector<BasisIndex> support = dicke_support_;
      std::vector<cplx> amps = haar_amplitudes(support.size(), rng);
      return PureState::from_support(spec_.n_qubits, std::move(support), std::move(amps));
    }
  }
  throw std::logic_error("unknown ensemble kind");
}

std::uint64_t EnsembleSampler::attempts() const {
  return spec_.kind == EnsembleSpec::Kind::EnergyConstrained ? energy_.attempts() : draws_;
}

}  // namespace dephase
