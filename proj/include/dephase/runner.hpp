#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dephase/interaction.hpp"
#include "dephase/sampling.hpp"
#include "dephase/stats.hpp"

namespace dephase {

/// Samples per random stream. Chunk k of a run always uses stream k.
inline constexpr std::uint64_t kChunkSize = 4096;

/// A coupling evaluated on every sampled state.
struct Observable {
  std::string label;
  InteractionSpec interaction;
};

struct EnsembleRun {
  EnsembleSpec ensemble;
  std::vector<std::string> labels;
  std::vector<std::string> interactions;  // format_interaction of each observable
  std::vector<double> q;
  std::vector<std::vector<double>> s;  // s[observable][sample]
  std::vector<std::uint64_t> chunk_counts;
  std::uint64_t attempts = 0;
  double wall_seconds = 0.0;

  std::size_t size() const { return q.size(); }
  std::vector<ScatterSample> scatter(std::size_t observable) const;
  MomentAccumulator moments(std::size_t observable) const;
};

unsigned default_workers();

/// Initial global entanglement, using the closed form for N = 1 Dicke states.
double ensemble_q(const PureState& state, const EnsembleSpec& spec);

/**
 * Draws spec.count states and evaluates Q plus each observable's final
 * entropy. Output is identical for any worker count. Sampler exceptions
 * (e.g. SamplerInfeasible) propagate after all workers stop.
 */
EnsembleRun run_ensemble(const EnsembleSpec& spec, const std::vector<Observable>& observables,
                         unsigned workers = 0);

}  // namespace dephase
