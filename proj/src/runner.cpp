#include "dephase/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

#include "dephase/measures.hpp"

namespace dephase {

std::vector<ScatterSample> EnsembleRun::scatter(std::size_t observable) const {
  std::vector<ScatterSample> out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = {q[i], s.at(observable)[i]};
  return out;
}

MomentAccumulator EnsembleRun::moments(std::size_t observable) const {
  MomentAccumulator acc;
  for (std::size_t i = 0; i < q.size(); ++i) acc.add(q[i], s.at(observable)[i]);
  return acc;
}

unsigned default_workers() { return std::max(1U, std::thread::hardware_concurrency()); }

double ensemble_q(const PureState& state, const EnsembleSpec& spec) {
  if (spec.kind == EnsembleSpec::Kind::Dicke && spec.excitations == 1 && state.is_sparse()) {
    return dicke_q_closed_form(state.amplitudes(), state.n_qubits(), 1);
  }
  return global_entanglement(state);
}

EnsembleRun run_ensemble(const EnsembleSpec& spec, const std::vector<Observable>& observables,
                         unsigned workers) {
  spec.validate();
  for (const auto& o : observables) {
    if (o.interaction.n_qubits() != spec.n_qubits) {
      throw std::invalid_argument("observable '" + o.label + "' does not match the qubit count");
    }
  }
  const auto start = std::chrono::steady_clock::now();
  std::vector<PointerBasis> bases;
  bases.reserve(observables.size());
  for (const auto& o : observables) bases.emplace_back(o.interaction);

  EnsembleRun run;
  run.ensemble = spec;
  for (const auto& o : observables) {
    run.labels.push_back(o.label);
    run.interactions.push_back(format_interaction(o.interaction));
  }
  run.q.resize(spec.count);
  run.s.assign(observables.size(), std::vector<double>(spec.count));
  const std::uint64_t chunks = (spec.count + kChunkSize - 1) / kChunkSize;
  run.chunk_counts.assign(chunks, 0);
  std::vector<std::uint64_t> chunk_attempts(chunks, 0);

  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto work = [&] {
    while (!failed.load()) {
      const std::uint64_t chunk = next.fetch_add(1);
      if (chunk >= chunks) return;
      try {
        Rng rng(spec.seed, chunk);
        EnsembleSampler sampler(spec);
        const std::uint64_t begin = chunk * kChunkSize;
        const std::uint64_t end = std::min(spec.count, begin + kChunkSize);
        for (std::uint64_t i = begin; i < end; ++i) {
          const PureState state = sampler.draw(rng);
          run.q[i] = ensemble_q(state, spec);
          for (std::size_t v = 0; v < bases.size(); ++v) run.s[v][i] = final_entropy(state, bases[v]);
        }
        run.chunk_counts[chunk] = end - begin;
        chunk_attempts[chunk] = sampler.attempts();
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };

  const unsigned n_workers = static_cast<unsigned>(
      std::min<std::uint64_t>(workers == 0 ? default_workers() : workers, chunks));
  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  for (std::uint64_t a : chunk_attempts) run.attempts += a;
  run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

}  // namespace dephase
