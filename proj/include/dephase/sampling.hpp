#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dephase/statevec.hpp"

namespace dephase {

/**
 * Random stream (seed, stream). Distinct stream indices give statistically
 * independent sequences; the runner assigns one stream per fixed-size chunk
 * of samples so results do not depend on the worker count.
 */
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on [0, 2 pi).
  double angle();

 private:
  std::mt19937_64 engine_;
};

class SamplerInfeasible : public std::runtime_error {
 public:
  SamplerInfeasible(const std::string& what, std::uint64_t attempts, std::uint64_t accepted)
      : std::runtime_error(what), attempts_(attempts), accepted_(accepted) {}
  std::uint64_t attempts() const { return attempts_; }
  std::uint64_t accepted() const { return accepted_; }

 private:
  std::uint64_t attempts_;
  std::uint64_t accepted_;
};

/// Moduli |c_m| of a Hurwitz-parametrized Haar vector of dimension `dim`.
std::vector<double> haar_moduli(std::size_t dim, Rng& rng);
/// Same, written into `moduli` (its size is the dimension).
void fill_haar_moduli(std::span<double> moduli, Rng& rng);
/// Attaches the Hurwitz phases (component 0 stays real).
std::vector<cplx> attach_haar_phases(std::span<const double> moduli, Rng& rng);
/// Haar-distributed unit vector of dimension `dim`.
std::vector<cplx> haar_amplitudes(std::size_t dim, Rng& rng);

PureState haar_state(int n_qubits, Rng& rng);
/// Haar-random SU(2) matrix.
Eigen::Matrix2cd random_su2(Rng& rng);
/// U_1 |0> (x) ... (x) U_n |0> with independent Haar SU(2) factors.
PureState separable_state(int n_qubits, Rng& rng);
/// Tensor product of independent Haar states with the given cluster sizes.
PureState cluster_state(std::span<const int> partition, Rng& rng);

/// (sqrt(1-x-E), sqrt(x), sqrt(x), sqrt(E-x)); both qubits have <E_i> = E.
PureState boundary_state_2q(double energy, double x);

/// Basis indices with exactly `excitations` ones, increasing.
std::vector<BasisIndex> dicke_support(int n_qubits, int excitations);
/// Haar coefficients over the N-excitation support (sparse for n > 12).
PureState dicke_generalized(int n_qubits, int excitations, Rng& rng);

/**
 * Rescales |c_j|^2 (keeping phases) by iterative proportional fitting until
 * every qubit has <E_i> = energy to within `tolerance`. Dense states only.
 */
PureState pin_occupations(const PureState& state, double energy, double tolerance = 1e-14);

inline constexpr std::uint64_t kDefaultMaxAttempts = 10'000'000;

/// Default acceptance half-width for the energy-constrained ensemble.
double default_energy_delta(int n_qubits);

/// Rejection sampler over Haar states with max_i |<E_i> - E| <= delta.
class EnergyConstrainedSampler {
 public:
  EnergyConstrainedSampler(int n_qubits, double energy, double delta,
                           std::uint64_t max_attempts = kDefaultMaxAttempts, bool pin = false);

  /// Throws SamplerInfeasible when max_attempts draws in a row are rejected.
  PureState draw(Rng& rng);

  std::uint64_t attempts() const { return attempts_; }
  std::uint64_t accepted() const { return accepted_; }
  double acceptance_rate() const;

 private:
  int n_qubits_;
  double energy_;
  double delta_;
  std::uint64_t max_attempts_;
  bool pin_;
  std::uint64_t attempts_ = 0;
  std::uint64_t accepted_ = 0;
};

PureState energy_constrained(int n_qubits, double energy, double delta, Rng& rng);

struct EnsembleSpec {
  enum class Kind { Haar, Separable, Clusters, EnergyConstrained, Dicke };

  Kind kind = Kind::Haar;
  int n_qubits = 2;
  std::vector<int> partition;
  double energy = 0.5;
  double delta = 0.01;
  bool pin = false;
  int excitations = 1;
  std::uint64_t count = 1;
  std::uint64_t seed = 0;
  std::uint64_t max_attempts = kDefaultMaxAttempts;

  void validate() const;
};

/**
 * Parses `haar`, `separable`, `clusters=2+2+2`, `energy=0.2[:delta[:exact]]`,
 * `dicke=1`. Count and seed are left at their defaults.
 */
EnsembleSpec parse_ensemble(std::string_view text, int n_qubits);
std::string format_ensemble(const EnsembleSpec& spec);

/// Draws states of one ensemble; one instance per worker.
class EnsembleSampler {
 public:
  explicit EnsembleSampler(EnsembleSpec spec);

  PureState draw(Rng& rng);
  /// Raw draws consumed (exceeds the sample count for rejection ensembles).
  std::uint64_t attempts() const;

  const EnsembleSpec& spec() const { return spec_; }

 private:
  EnsembleSpec spec_;
  EnergyConstrainedSampler energy_;
  std::vector<BasisIndex> dicke_support_;
  std::uint64_t draws_ = 0;
};

}  // namespace dephase
