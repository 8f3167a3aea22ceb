#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dephase/runner.hpp"
#include "dephase/stats.hpp"

namespace dephase {

std::string tool_version();

/// Per-run seed derived from the user seed and a run tag.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);

struct ExperimentConfig {
  std::string name;  // registry entry, or "sample" for an ad-hoc run
  std::optional<int> n_qubits;
  std::optional<std::string> ensemble;
  std::optional<std::string> interaction;
  std::optional<int> interacting;
  std::optional<std::uint64_t> samples;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  BinOptions bins;
};

enum class LineKind { None, MeanPoint, LeastSquares };

/// One scatter series: an ensemble evaluated under one coupling.
struct Series {
  std::string label;
  int n_qubits = 0;
  std::string ensemble;
  std::string interaction;
  std::string q_measure = "global_entanglement";
  std::vector<ScatterSample> samples;
  RunSummary summary;
  LineKind line_kind = LineKind::None;
  std::optional<double> reference_s;
  std::uint64_t seed = 0;
  std::uint64_t attempts = 0;
  std::vector<std::uint64_t> chunk_counts;
  double wall_seconds = 0.0;
};

/// Builds a series from observable `v` of a run and summarizes it.
Series make_series(const EnsembleRun& run, std::size_t v, std::string label, LineKind line_kind,
                   std::optional<double> reference_s, const BinOptions& bins);

struct ExperimentResult {
  std::string name;
  std::string description;
  ExperimentConfig config;
  std::vector<Series> series;
  double wall_seconds = 0.0;

  const Series* find(std::string_view label) const;
};

struct ExperimentInfo {
  std::string name;
  std::string description;
  std::uint64_t default_samples;
};

const std::vector<ExperimentInfo>& registry();
const ExperimentInfo* find_experiment(std::string_view name);

/// Throws std::invalid_argument for unknown names or malformed overrides.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Header `q,s,series,n_qubits,ensemble,interaction`; 17 significant digits.
void write_csv(const ExperimentResult& result, std::ostream& out);
/// Summary object with the run manifest (config echo, seeds, stream counts, timing).
std::string summary_json(const ExperimentResult& result);

}  // namespace dephase
