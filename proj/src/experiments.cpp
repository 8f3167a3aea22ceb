#include "dephase/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "dephase/measures.hpp"
#include "json.hpp"

namespace dephase {

namespace {

using json = nlohmann::json;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Context {
  const ExperimentConfig& config;
  ExperimentResult& result;

  std::uint64_t samples(std::uint64_t fallback) const { return config.samples.value_or(fallback); }

  EnsembleRun run(EnsembleSpec spec, const std::vector<Observable>& observables) const {
    return run_ensemble(spec, observables, config.workers);
  }

  EnsembleSpec spec(EnsembleSpec::Kind kind, int n, std::uint64_t count, const std::string& tag) const {
    EnsembleSpec s;
    s.kind = kind;
    s.n_qubits = n;
    s.count = count;
    s.seed = derive_seed(config.seed, tag);
    return s;
  }

  void add(const EnsembleRun& run, std::size_t v, std::string label, LineKind kind,
           std::optional<double> reference) const {
    result.series.push_back(make_series(run, v, std::move(label), kind, reference, config.bins));
  }
};

std::vector<int> qubit_list(const ExperimentConfig& config, std::vector<int> fallback) {
  if (config.n_qubits) return {*config.n_qubits};
  return fallback;
}

/// The --interaction override, or distinct couplings along `axis`.
Observable coupling(const ExperimentConfig& config, char axis, int n, int interacting) {
  if (config.interaction) {
    InteractionSpec spec = parse_interaction(*config.interaction);
    if (spec.n_qubits() != n) {
      throw std::invalid_argument("--interaction has " + std::to_string(spec.n_qubits()) +
                                  " terms but the run has " + std::to_string(n) + " qubits");
    }
    return {*config.interaction, spec};
  }
  InteractionSpec spec = InteractionSpec::distinct(axis, n, interacting);
  std::string label(1, axis);
  if (interacting != n) label += "[" + std::to_string(interacting) + "/" + std::to_string(n) + "]";
  return {label, spec};
}

std::string tag(std::string_view experiment, std::string_view ensemble, int n) {
  return std::string(experiment) + "/" + std::string(ensemble) + "/" + std::to_string(n);
}

// Haar ensemble against a separable reference, σ_z on every qubit.
void run_haar_table(Context& ctx) {
  for (int n : qubit_list(ctx.config, {2, 3, 4, 5, 6})) {
    const std::vector<Observable> obs{coupling(ctx.config, 'z', n, n)};
    const std::uint64_t count = ctx.samples(100'000);
    const auto sep = ctx.run(ctx.spec(EnsembleSpec::Kind::Separable, n, count, tag("haar-table", "separable", n)), obs);
    const auto haar = ctx.run(ctx.spec(EnsembleSpec::Kind::Haar, n, count, tag("haar-table", "haar", n)), obs);
    const double ref = sep.moments(0).mean_s();
    ctx.add(sep, 0, std::to_string(n) + "q separable", LineKind::None, std::nullopt);
    ctx.add(haar, 0, std::to_string(n) + "q haar", LineKind::MeanPoint, ref);
  }
}

void run_partial(Context& ctx) {
  for (int n : qubit_list(ctx.config, {2, 3, 4})) {
    std::vector<int> ks;
    if (ctx.config.interacting) {
      ks = {*ctx.config.interacting};
    } else {
      for (int k = 1; k <= n; ++k) ks.push_back(k);
    }
    std::vector<Observable> obs;
    for (int k : ks) {
      if (k < 1 || k > n) throw std::invalid_argument("--interacting must lie in [1, n]");
      obs.push_back(coupling(ctx.config, 'z', n, k));
    }
    const std::uint64_t count = ctx.samples(100'000);
    const auto sep = ctx.run(ctx.spec(EnsembleSpec::Kind::Separable, n, count, tag("partial", "separable", n)), obs);
    const auto haar = ctx.run(ctx.spec(EnsembleSpec::Kind::Haar, n, count, tag("partial", "haar", n)), obs);
    for (std::size_t v = 0; v < obs.size(); ++v) {
      const std::string label = std::to_string(n) + "q k=" + std::to_string(ks[v]);
      ctx.add(sep, v, label + " separable", LineKind::None, std::nullopt);
      ctx.add(haar, v, label + " haar", LineKind::MeanPoint, sep.moments(v).mean_s());
    }
  }
}

void run_clusters(Context& ctx) {
  const int n = ctx.config.n_qubits.value_or(6);
  std::vector<std::vector<int>> partitions;
  if (ctx.config.ensemble) {
    partitions.push_back(parse_ensemble(*ctx.config.ensemble, n).partition);
    if (partitions.back().empty()) throw std::invalid_argument("fig4 takes a clusters=... ensemble");
  } else if (n == 6) {
    partitions = {{1, 1, 1, 1, 1, 1}, {2, 2, 2}, {3, 3}, {4, 2}, {5, 1}, {6}};
  } else {
    partitions = {std::vector<int>(static_cast<std::size_t>(n), 1), {n}};
  }
  const std::vector<Observable> obs{coupling(ctx.config, 'z', n, n)};
  const std::uint64_t count = ctx.samples(100'000);
  const auto sep = ctx.run(ctx.spec(EnsembleSpec::Kind::Separable, n, count, tag("clusters", "separable", n)), obs);
  const double ref = sep.moments(0).mean_s();
  ctx.add(sep, 0, std::to_string(n) + "q separable", LineKind::None, std::nullopt);
  for (const auto& p : partitions) {
    EnsembleSpec spec = ctx.spec(EnsembleSpec::Kind::Clusters, n, count, "");
    spec.partition = p;
    const std::string name = format_ensemble(spec);
    spec.seed = derive_seed(ctx.config.seed, tag("clusters", name, n));
    const auto run = ctx.run(spec, obs);
    ctx.add(run, 0, std::to_string(n) + "q " + name, LineKind::MeanPoint, ref);
  }
}

void run_energy(Context& ctx, std::vector<int> default_ns) {
  for (int n : qubit_list(ctx.config, std::move(default_ns))) {
    std::vector<EnsembleSpec> specs;
    if (ctx.config.ensemble) {
      specs.push_back(parse_ensemble(*ctx.config.ensemble, n));
      if (specs.back().kind != EnsembleSpec::Kind::EnergyConstrained) {
        throw std::invalid_argument("energy experiments take an energy=... ensemble");
      }
    } else {
      const std::vector<double> energies =
          n == 2 ? std::vector<double>{0.5, 0.2, 0.1, 0.05} : std::vector<double>{0.5, 0.2, 0.1};
      for (double e : energies) {
        std::ostringstream text;
        text << "energy=" << e;
        specs.push_back(parse_ensemble(text.str(), n));
      }
    }
    std::vector<Observable> obs;
    if (ctx.config.interaction) {
      obs.push_back(coupling(ctx.config, 'z', n, n));
    } else {
      obs = {coupling(ctx.config, 'z', n, n), coupling(ctx.config, 'x', n, n)};
    }
    for (EnsembleSpec spec : specs) {
      spec.count = ctx.samples(10'000);
      const std::string name = format_ensemble(spec);
      spec.seed = derive_seed(ctx.config.seed, tag("energy", name, n));
      const auto run = ctx.run(spec, obs);
      for (std::size_t v = 0; v < obs.size(); ++v) {
        ctx.add(run, v, std::to_string(n) + "q " + name + " " + obs[v].label, LineKind::LeastSquares,
                std::nullopt);
      }
    }
  }
}

void run_dicke(Context& ctx, std::vector<std::pair<int, int>> columns, bool with_sigma_x,
               bool with_haar) {
  if (ctx.config.n_qubits || ctx.config.ensemble) {
    std::vector<std::pair<int, int>> filtered;
    for (auto [n, big_n] : columns) {
      if (ctx.config.n_qubits && n != *ctx.config.n_qubits) continue;
      filtered.emplace_back(n, big_n);
    }
    if (ctx.config.n_qubits && filtered.empty()) {
      const int n = *ctx.config.n_qubits;
      filtered.emplace_back(n, 1);
    }
    if (ctx.config.ensemble) {
      const int n = filtered.empty() ? 4 : filtered.front().first;
      const EnsembleSpec spec = parse_ensemble(*ctx.config.ensemble, n);
      if (spec.kind != EnsembleSpec::Kind::Dicke) {
        throw std::invalid_argument("Dicke experiments take a dicke=N ensemble");
      }
      std::vector<std::pair<int, int>> chosen;
      for (auto [m, big_n] : filtered) {
        (void)big_n;
        if (std::find(chosen.begin(), chosen.end(), std::pair{m, spec.excitations}) == chosen.end()) {
          chosen.emplace_back(m, spec.excitations);
        }
      }
      filtered = chosen;
    }
    columns = filtered;
  }
  const std::uint64_t count = ctx.samples(100'000);
  std::vector<int> haar_done;
  for (auto [n, big_n] : columns) {
    std::vector<Observable> obs;
    if (ctx.config.interaction) {
      obs.push_back(coupling(ctx.config, 'z', n, n));
    } else {
      obs.push_back(coupling(ctx.config, 'z', n, n));
      if (with_sigma_x && n <= 12) obs.push_back(coupling(ctx.config, 'x', n, n));
    }
    if (with_haar && std::find(haar_done.begin(), haar_done.end(), n) == haar_done.end()) {
      haar_done.push_back(n);
      const auto haar = ctx.run(ctx.spec(EnsembleSpec::Kind::Haar, n, count, tag("dicke", "haar", n)), obs);
      for (std::size_t v = 0; v < obs.size(); ++v) {
        ctx.add(haar, v, std::to_string(n) + "q haar " + obs[v].label, LineKind::LeastSquares, std::nullopt);
      }
    }
    EnsembleSpec spec = ctx.spec(EnsembleSpec::Kind::Dicke, n, count, "");
    spec.excitations = big_n;
    const std::string name = format_ensemble(spec);
    spec.seed = derive_seed(ctx.config.seed, tag("dicke", name, n));
    const auto run = ctx.run(spec, obs);
    for (std::size_t v = 0; v < obs.size(); ++v) {
      ctx.add(run, v, std::to_string(n) + "q " + name + " " + obs[v].label, LineKind::LeastSquares,
              std::nullopt);
    }
  }
}

// Two-qubit families along a Schmidt-angle grid: a|00> + b|11> and its
// Hadamard-rotated partner, with the entanglement entropy as the abscissa.
void run_families(Context& ctx) {
  if (ctx.config.n_qubits && *ctx.config.n_qubits != 2) throw std::invalid_argument("fig1 is 2-qubit only");
  const std::uint64_t points = std::max<std::uint64_t>(2, ctx.samples(101));
  const double r2 = default_coupling_magnitude(1);
  std::vector<std::pair<std::string, InteractionSpec>> phi_couplings;
  if (ctx.config.interaction) {
    phi_couplings.emplace_back(*ctx.config.interaction, parse_interaction(*ctx.config.interaction));
  } else {
    phi_couplings = {{"z,i", parse_interaction("z,i")},
                     {"z,z'", InteractionSpec::distinct('z', 2)},
                     {"x,i", parse_interaction("x,i")},
                     {"x,x'", InteractionSpec::distinct('x', 2)},
                     {"x,z'", InteractionSpec{{QubitOperator::sigma_x(), QubitOperator::sigma_z(r2)}}},
                     {"n,m", parse_interaction("0:0.3:0.5:0.8,0:-0.6:0.2:0.7")}};
  }
  const std::vector<std::pair<std::string, InteractionSpec>> rotated_couplings{
      {"x,i", parse_interaction("x,i")}, {"x,x'", InteractionSpec::distinct('x', 2)}};

  auto sweep = [&](const std::string& family, bool rotated, const auto& couplings) {
    for (const auto& [label, spec] : couplings) {
      if (spec.n_qubits() != 2) throw std::invalid_argument("fig1 couplings act on 2 qubits");
      const PointerBasis basis(spec);
      Series s;
      s.label = family + " " + label;
      s.n_qubits = 2;
      s.ensemble = family;
      s.interaction = format_interaction(spec);
      s.q_measure = "entanglement_entropy";
      for (std::uint64_t k = 0; k < points; ++k) {
        const double theta = std::numbers::pi / 4.0 * static_cast<double>(k) / static_cast<double>(points - 1);
        const double a = std::cos(theta), b = std::sin(theta);
        const PureState state = rotated ? PureState::dense(2, {a / std::sqrt(2.0), b / std::sqrt(2.0),
                                                               b / std::sqrt(2.0), a / std::sqrt(2.0)})
                                        : PureState::dense(2, {a, 0.0, 0.0, b});
        s.samples.push_back({entanglement_entropy(state), final_entropy(state, basis)});
      }
      s.attempts = points;
      s.chunk_counts = {points};
      const auto fit = regression_line(s.samples, 1.0);
      s.summary = summarize(s.samples, fit ? fit->intercept : 0.0, 1.0, ctx.config.bins);
      s.summary.line = fit;
      s.summary.entanglement_fraction.reset();
      s.line_kind = LineKind::LeastSquares;
      ctx.result.series.push_back(std::move(s));
    }
  };
  sweep("phi", false, phi_couplings);
  if (!ctx.config.interaction) sweep("phi-x", true, rotated_couplings);
}

void run_adhoc(Context& ctx) {
  std::optional<InteractionSpec> given;
  if (ctx.config.interaction) given = parse_interaction(*ctx.config.interaction);
  const int n = ctx.config.n_qubits.value_or(given ? given->n_qubits() : 2);
  EnsembleSpec spec = parse_ensemble(ctx.config.ensemble.value_or("haar"), n);
  spec.count = ctx.samples(1000);
  spec.seed = derive_seed(ctx.config.seed, tag("sample", format_ensemble(spec), n));
  const Observable obs = coupling(ctx.config, 'z', n, ctx.config.interacting.value_or(n));
  if (ctx.config.interacting && (*ctx.config.interacting < 1 || *ctx.config.interacting > n)) {
    throw std::invalid_argument("--interacting must lie in [1, n]");
  }
  const auto run = ctx.run(spec, {obs});
  const LineKind kind = spec.kind == EnsembleSpec::Kind::Separable ? LineKind::None : LineKind::LeastSquares;
  ctx.add(run, 0, std::to_string(n) + "q " + format_ensemble(spec), kind, std::nullopt);
}

using Runner = std::function<void(Context&)>;

struct Entry {
  ExperimentInfo info;
  Runner runner;
};

const std::vector<std::pair<int, int>> kDickeColumns{{4, 1}, {4, 2}, {6, 1}, {6, 2}, {6, 3}};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t;
    auto add = [&](std::string name, std::string description, std::uint64_t samples, Runner r) {
      t.push_back({{std::move(name), std::move(description), samples}, std::move(r)});
    };
    add("fig1", "2-qubit a|00>+b|11> families: final entropy vs entanglement entropy per coupling", 101,
        run_families);
    const std::string haar = "Haar vs separable ensembles, n=2..6, distinct sigma_z couplings";
    add("fig2", haar, 100'000, run_haar_table);
    add("table600", haar, 100'000, run_haar_table);
    const std::string partial = "partial interaction: k of n qubits coupled, n=2..4";
    add("fig3", partial, 100'000, run_partial);
    add("table602", partial, 100'000, run_partial);
    add("fig4", "6-qubit products of Haar clusters: 1^6, 2+2+2, 3+3, 4+2, 5+1, 6", 100'000, run_clusters);
    add("fig5", "2-qubit equal-occupation ensembles, E=0.5,0.2,0.1,0.05, sigma_z and sigma_x", 10'000,
        [](Context& c) { run_energy(c, {2}); });
    add("fig6", "3-qubit equal-occupation ensembles, E=0.5,0.2,0.1, sigma_z and sigma_x", 10'000,
        [](Context& c) { run_energy(c, {3}); });
    add("appC", "equal-occupation means for 2 and 3 qubits", 10'000,
        [](Context& c) { run_energy(c, {2, 3}); });
    const std::string dicke = "generalized Dicke states, (n,N) in (4,1),(4,2),(6,1),(6,2),(6,3), sigma_z and sigma_x";
    add("fig7", dicke, 100'000, [](Context& c) { run_dicke(c, kDickeColumns, true, false); });
    add("dicke-table", dicke, 100'000, [](Context& c) { run_dicke(c, kDickeColumns, true, false); });
    add("fig8", "N=1 Dicke states under sigma_z, n=2,4,8,16,32,64", 100'000, [](Context& c) {
      run_dicke(c, {{2, 1}, {4, 1}, {8, 1}, {16, 1}, {32, 1}, {64, 1}}, false, false);
    });
    add("appE", "Dicke means and variances with Haar columns for n=4,6", 100'000,
        [](Context& c) { run_dicke(c, kDickeColumns, true, true); });
    add("sample", "ad-hoc run of --ensemble under --interaction", 1000, run_adhoc);
    return t;
  }();
  return table;
}

json line_json(const std::optional<LineFit>& line) {
  if (!line) return nullptr;
  return {{"intercept", line->intercept},
          {"slope", line->slope},
          {"angle_degrees", line->angle_degrees},
          {"s_at_qmax", line->s_at_qmax}};
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

const char* line_kind_name(LineKind k) {
  switch (k) {
    case LineKind::None: return "none";
    case LineKind::MeanPoint: return "mean-point";
    case LineKind::LeastSquares: return "least-squares";
  }
  return "none";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string tool_version() { return "1.0.0"; }

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(seed ^ splitmix64(h));
}

Series make_series(const EnsembleRun& run, std::size_t v, std::string label, LineKind line_kind,
                   std::optional<double> reference_s, const BinOptions& bins) {
  Series s;
  s.label = std::move(label);
  s.n_qubits = run.ensemble.n_qubits;
  s.ensemble = format_ensemble(run.ensemble);
  s.interaction = run.interactions.at(v);
  s.samples = run.scatter(v);
  s.line_kind = line_kind;
  s.reference_s = reference_s;
  s.seed = run.ensemble.seed;
  s.attempts = run.attempts;
  s.chunk_counts = run.chunk_counts;
  s.wall_seconds = run.wall_seconds;
  const double q_max = run.ensemble.n_qubits / 2.0;
  if (s.samples.size() < 2) {
    const MomentAccumulator acc = run.moments(v);
    s.summary.count = acc.count();
    s.summary.mean_q = acc.mean_q();
    s.summary.mean_s = acc.mean_s();
    s.summary.binned_curve = binned_means(s.samples, bins.width, bins.min_count);
    return s;
  }
  switch (line_kind) {
    case LineKind::MeanPoint:
      s.summary = summarize(s.samples, reference_s.value_or(0.0), q_max, bins);
      break;
    case LineKind::LeastSquares: {
      const auto fit = regression_line(s.samples, q_max);
      s.summary = summarize(s.samples, fit ? fit->intercept : 0.0, q_max, bins);
      s.summary.line = fit;
      s.summary.entanglement_fraction.reset();
      break;
    }
    case LineKind::None:
      s.summary = summarize(s.samples, 0.0, q_max, bins);
      s.summary.line.reset();
      s.summary.entanglement_fraction.reset();
      break;
  }
  return s;
}

const Series* ExperimentResult::find(std::string_view label) const {
  for (const auto& s : series) {
    if (s.label == label) return &s;
  }
  return nullptr;
}

const std::vector<ExperimentInfo>& registry() {
  static const std::vector<ExperimentInfo> infos = [] {
    std::vector<ExperimentInfo> out;
    for (const auto& e : entries()) out.push_back(e.info);
    return out;
  }();
  return infos;
}

const ExperimentInfo* find_experiment(std::string_view name) {
  for (const auto& info : registry()) {
    if (info.name == name) return &info;
  }
  return nullptr;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const auto it = std::find_if(entries().begin(), entries().end(),
                               [&](const Entry& e) { return e.info.name == config.name; });
  if (it == entries().end()) throw std::invalid_argument("unknown experiment '" + config.name + "'");
  if (config.samples && *config.samples < 1) throw std::invalid_argument("--samples must be >= 1");
  if (config.n_qubits && *config.n_qubits < 1) throw std::invalid_argument("--qubits must be >= 1");
  if (!(config.bins.width > 0.0)) throw std::invalid_argument("--bins must be positive");
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult result;
  result.name = config.name;
  result.description = it->info.description;
  result.config = config;
  Context ctx{config, result};
  it->runner(ctx);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

void write_csv(const ExperimentResult& result, std::ostream& out) {
  out << "q,s,series,n_qubits,ensemble,interaction\n";
  char q_buf[40], s_buf[40];
  for (const auto& s : result.series) {
    const std::string tail = csv_field(s.label) + "," + std::to_string(s.n_qubits) + "," +
                             csv_field(s.ensemble) + "," + csv_field(s.interaction) + "\n";
    for (const auto& x : s.samples) {
      std::snprintf(q_buf, sizeof q_buf, "%.17g", x.q);
      std::snprintf(s_buf, sizeof s_buf, "%.17g", x.s);
      out << q_buf << ',' << s_buf << ',' << tail;
    }
  }
}

std::string summary_json(const ExperimentResult& result) {
  const ExperimentConfig& c = result.config;
  json config = {{"name", c.name},
                 {"seed", c.seed},
                 {"workers", c.workers == 0 ? default_workers() : c.workers},
                 {"bin_width", c.bins.width},
                 {"bin_min_count", c.bins.min_count},
                 {"chunk_size", kChunkSize}};
  config["qubits"] = optional_json(c.n_qubits);
  config["ensemble"] = optional_json(c.ensemble);
  config["interaction"] = optional_json(c.interaction);
  config["interacting"] = optional_json(c.interacting);
  config["samples"] = optional_json(c.samples);

  json series = json::array();
  for (const auto& s : result.series) {
    json bins = json::array();
    for (const auto& b : s.summary.binned_curve) {
      bins.push_back({{"center", b.center}, {"mean_s", b.mean_s}, {"count", b.count}});
    }
    json summary = {{"count", s.summary.count},   {"mean_q", s.summary.mean_q},
                    {"mean_s", s.summary.mean_s}, {"var_q", s.summary.var_q},
                    {"var_s", s.summary.var_s},   {"binned_curve", bins}};
    summary["pearson"] = optional_json(s.summary.pearson);
    summary["line"] = line_json(s.summary.line);
    summary["entanglement_fraction"] = optional_json(s.summary.entanglement_fraction);
    const double rate = s.attempts ? static_cast<double>(s.samples.size()) / static_cast<double>(s.attempts) : 0.0;
    series.push_back({{"label", s.label},
                      {"n_qubits", s.n_qubits},
                      {"ensemble", s.ensemble},
                      {"interaction", s.interaction},
                      {"q_measure", s.q_measure},
                      {"line_kind", line_kind_name(s.line_kind)},
                      {"reference_s", optional_json(s.reference_s)},
                      {"seed", s.seed},
                      {"attempts", s.attempts},
                      {"acceptance_rate", rate},
                      {"stream_counts", s.chunk_counts},
                      {"wall_seconds", s.wall_seconds},
                      {"summary", summary}});
  }
  json doc = {{"tool", "dephase-lab"},
              {"version", tool_version()},
              {"experiment", result.name},
              {"description", result.description},
              {"config", config},
              {"wall_seconds", result.wall_seconds},
              {"series", series}};
  return doc.dump(2);
}

}  // namespace dephase
