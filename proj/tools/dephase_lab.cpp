// dephase-lab: sample ensembles, run named experiments, verify acceptance targets.

#include <cstdlib>
#include <cstring>
#include <functional>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dephase/acceptance.hpp"
#include "dephase/experiments.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr std::uint64_t kDefaultSeed = 7;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunFlags {
  std::optional<int> qubits;
  std::optional<std::uint64_t> samples;
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;
  std::optional<std::string> ensemble;
  std::optional<std::string> interaction;
  std::optional<int> interacting;
  double bin_width = 0.05;
  std::uint64_t min_count = 200;
  std::string out;
  std::string summary;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--qubits", f.qubits, "number of qubits");
  cmd->add_option("--samples", f.samples, "samples per series (accepted samples for rejection ensembles)");
  cmd->add_option("--seed", f.seed, "base seed (fallback: DEPHASE_LAB_SEED, then 7)");
  cmd->add_option("--workers", f.workers, "worker threads (0 = all cores)");
  cmd->add_option("--ensemble", f.ensemble, "haar | separable | clusters=2+2+2 | energy=E[:delta[:exact]] | dicke=N");
  cmd->add_option("--interaction", f.interaction, "per-qubit couplings, e.g. z,2z or x,i or 0:0:0:1,z");
  cmd->add_option("--interacting", f.interacting, "couple only the first k qubits");
  cmd->add_option("--bins", f.bin_width, "bin width in Q for averaged curves")->check(CLI::PositiveNumber);
  cmd->add_option("--min-count", f.min_count, "minimum samples per emitted bin");
  cmd->add_option("--out", f.out, "CSV output path ('-' for stdout; default stdout)");
  cmd->add_option("--summary", f.summary, "JSON summary path ('-' for stdout)");
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("DEPHASE_LAB_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used, 10);
      if (used == std::strlen(env)) return v;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("DEPHASE_LAB_SEED is not an unsigned integer: '") + env + "'");
  }
  return kDefaultSeed;
}

void write_to(const std::string& path, const std::function<void(std::ostream&)>& emit) {
  if (path == "-") {
    emit(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
  emit(file);
  if (!file) throw std::runtime_error("write to '" + path + "' failed");
}

void print_overview(const dephase::ExperimentResult& result, std::ostream& out) {
  char line[256];
  std::snprintf(line, sizeof line, "%-32s %9s %9s %9s %9s %9s %8s %8s\n", "series", "count", "mean_q", "mean_s",
                "var_q", "var_s", "pearson", "angle");
  out << line;
  for (const auto& s : result.series) {
    const auto& m = s.summary;
    std::snprintf(line, sizeof line, "%-32s %9llu %9.4f %9.4f %9.5f %9.5f %8s %8s\n", s.label.c_str(),
                  static_cast<unsigned long long>(m.count), m.mean_q, m.mean_s, m.var_q, m.var_s,
                  m.pearson ? std::to_string(m.pearson.value()).substr(0, 7).c_str() : "-",
                  m.line ? std::to_string(m.line->angle_degrees).substr(0, 7).c_str() : "-");
    out << line;
  }
}

int run(const std::string& name, const RunFlags& f) {
  if (f.out == "-" && f.summary == "-") throw UsageError("--out and --summary cannot both be stdout");
  dephase::ExperimentConfig config;
  config.name = name;
  config.n_qubits = f.qubits;
  config.samples = f.samples;
  config.seed = resolve_seed(f.seed);
  config.workers = f.workers;
  config.ensemble = f.ensemble;
  config.interaction = f.interaction;
  config.interacting = f.interacting;
  config.bins = {f.bin_width, f.min_count};
  const dephase::ExperimentResult result = dephase::run_experiment(config);

  const bool csv_to_stdout = f.out.empty() || f.out == "-";
  write_to(csv_to_stdout ? "-" : f.out, [&](std::ostream& o) { dephase::write_csv(result, o); });
  if (!f.summary.empty()) {
    write_to(f.summary, [&](std::ostream& o) { o << dephase::summary_json(result) << "\n"; });
  }
  if (!csv_to_stdout || f.summary != "-") print_overview(result, std::cerr);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Final entropy vs initial entanglement under pure dephasing"};
  app.require_subcommand(1);

  RunFlags sample_flags, experiment_flags;
  auto* sample = app.add_subcommand("sample", "ad-hoc ensemble run (CSV rows q,s,...)");
  add_run_flags(sample, sample_flags);

  std::string experiment_name;
  auto* experiment = app.add_subcommand("experiment", "run a named experiment (see 'list')");
  experiment->add_option("name", experiment_name, "experiment name")->required();
  add_run_flags(experiment, experiment_flags);

  dephase::VerifyOptions verify_options;
  std::optional<std::uint64_t> verify_seed;
  std::vector<int> criteria;
  bool brief = false;
  auto* verify = app.add_subcommand("verify", "run the acceptance criteria and print a pass/fail report");
  verify->add_option("--seed", verify_seed, "base seed (fallback: DEPHASE_LAB_SEED, then 7)");
  verify->add_option("--workers", verify_options.workers, "worker threads (0 = all cores)");
  verify->add_option("--tolerance-scale", verify_options.tolerance_scale, "multiply every tolerance")
      ->check(CLI::NonNegativeNumber);
  verify->add_flag("--properties-only", verify_options.properties_only, "closed forms and property suites only");
  verify->add_option("--criterion", criteria, "run only these criterion numbers")->check(CLI::Range(1, 9));
  verify->add_option("--haar-samples", verify_options.haar_samples, "Haar/separable samples per size");
  verify->add_option("--energy-accepted", verify_options.energy_accepted, "accepted equal-occupation samples");
  verify->add_option("--dicke-samples", verify_options.dicke_samples, "Dicke samples per column");
  verify->add_flag("--brief", brief, "only the per-criterion lines");

  app.add_subcommand("list", "list named experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (app.got_subcommand("list")) {
      for (const auto& info : dephase::registry()) {
        std::printf("%-12s %s (default %llu samples)\n", info.name.c_str(), info.description.c_str(),
                    static_cast<unsigned long long>(info.default_samples));
      }
      return 0;
    }
    if (*sample) return run("sample", sample_flags);
    if (*experiment) {
      if (experiment_name == "sample") throw UsageError("use the 'sample' subcommand for ad-hoc runs");
      if (!dephase::find_experiment(experiment_name)) {
        throw UsageError("unknown experiment '" + experiment_name + "' (see 'dephase-lab list')");
      }
      return run(experiment_name, experiment_flags);
    }
    if (*verify) {
      verify_options.seed = resolve_seed(verify_seed);
      verify_options.only.insert(criteria.begin(), criteria.end());
      const auto reports = dephase::run_acceptance(verify_options, &std::cerr);
      dephase::print_report(reports, std::cout, !brief);
      return dephase::all_passed(reports) ? 0 : kExitRuntime;
    }
  } catch (const UsageError& e) {
    std::cerr << "dephase-lab: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "dephase-lab: " << e.what() << "\n";
    return kExitUsage;
  } catch (const dephase::SamplerInfeasible& e) {
    std::cerr << "dephase-lab: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "dephase-lab: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
