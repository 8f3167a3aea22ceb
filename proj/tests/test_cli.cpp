#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dephase/experiments.hpp"
#include "json.hpp"

using namespace dephase;
using nlohmann::json;

#ifndef DEPHASE_LAB_BIN
#error "DEPHASE_LAB_BIN must point at the built CLI"
#endif

namespace {

struct Shell {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Shell lab(const std::string& args, const std::string& env = "") {
  static int counter = 0;
  const std::string base = testing::TempDir() + "dephase_cli_" + std::to_string(++counter);
  const std::string cmd = env + " " + DEPHASE_LAB_BIN + " " + args + " >" + base + ".out 2>" + base + ".err";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(base + ".out"), slurp(base + ".err")};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string csv_of(const ExperimentResult& r) {
  std::ostringstream out;
  write_csv(r, out);
  return out.str();
}

ExperimentConfig config(std::string name, std::uint64_t samples, std::uint64_t seed = 7) {
  ExperimentConfig c;
  c.name = std::move(name);
  c.samples = samples;
  c.seed = seed;
  c.workers = 1;
  return c;
}

}  // namespace

TEST(Registry, ListsTheNamedExperiments) {
  EXPECT_GE(registry().size(), 9u);
  for (const char* name : {"fig1", "fig2", "table600", "fig3", "table602", "fig4", "fig5", "fig6", "appC", "fig7",
                           "dicke-table", "fig8", "appE"}) {
    EXPECT_NE(find_experiment(name), nullptr) << name;
  }
  EXPECT_EQ(find_experiment("fig9"), nullptr);
  EXPECT_THROW(run_experiment(config("fig9", 10)), std::invalid_argument);
}

TEST(DeriveSeed, DependsOnSeedAndTag) {
  EXPECT_EQ(derive_seed(7, "a"), derive_seed(7, "a"));
  EXPECT_NE(derive_seed(7, "a"), derive_seed(7, "b"));
  EXPECT_NE(derive_seed(7, "a"), derive_seed(8, "a"));
}

TEST(RunExperiment, SingleSeparableSample) {
  ExperimentConfig c = config("sample", 1);
  c.n_qubits = 2;
  c.ensemble = "separable";
  c.interaction = "z,2z";
  const ExperimentResult r = run_experiment(c);
  ASSERT_EQ(r.series.size(), 1u);
  ASSERT_EQ(r.series[0].samples.size(), 1u);
  EXPECT_LT(r.series[0].samples[0].q, 1e-9);
  const auto rows = lines(csv_of(r));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "q,s,series,n_qubits,ensemble,interaction");
  EXPECT_NE(rows[1].find(",2,separable,\"1z,2z\""), std::string::npos) << rows[1];
}

TEST(RunExperiment, RowCountMatchesRequest) {
  ExperimentConfig c = config("sample", 777);
  c.n_qubits = 3;
  c.ensemble = "energy=0.5:0.05";
  const ExperimentResult r = run_experiment(c);
  EXPECT_EQ(lines(csv_of(r)).size(), 778u);
  EXPECT_GE(r.series[0].attempts, 777u);
}

TEST(RunExperiment, CsvQuotesFieldsWithCommas) {
  ExperimentConfig c = config("sample", 5);
  c.interaction = "z,i";
  const auto rows = lines(csv_of(run_experiment(c)));
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_NE(rows[1].find(",\"1z,i\""), std::string::npos) << rows[1];
}

TEST(RunExperiment, CsvIndependentOfWorkerCount) {
  ExperimentConfig c = config("fig2", 5000, 11);
  c.n_qubits = 3;
  const std::string one = csv_of(run_experiment(c));
  c.workers = 4;
  EXPECT_EQ(csv_of(run_experiment(c)), one);
  c.seed = 12;
  EXPECT_NE(csv_of(run_experiment(c)), one);
}

TEST(RunExperiment, SummaryJsonCarriesManifestAndSummary) {
  ExperimentConfig c = config("fig2", 3000);
  c.n_qubits = 2;
  const ExperimentResult r = run_experiment(c);
  const json doc = json::parse(summary_json(r));
  EXPECT_EQ(doc["tool"], "dephase-lab");
  EXPECT_EQ(doc["version"], tool_version());
  EXPECT_EQ(doc["experiment"], "fig2");
  EXPECT_EQ(doc["config"]["seed"], 7);
  EXPECT_EQ(doc["config"]["qubits"], 2);
  EXPECT_EQ(doc["config"]["samples"], 3000);
  ASSERT_EQ(doc["series"].size(), 2u);
  for (const auto& s : doc["series"]) {
    for (const char* key : {"label", "n_qubits", "ensemble", "interaction", "seed", "attempts", "stream_counts",
                            "wall_seconds", "summary"}) {
      EXPECT_TRUE(s.contains(key)) << key;
    }
    for (const char* key : {"count", "mean_q", "mean_s", "var_q", "var_s", "pearson", "line", "binned_curve",
                            "entanglement_fraction"}) {
      EXPECT_TRUE(s["summary"].contains(key)) << key;
    }
    EXPECT_EQ(s["summary"]["count"], 3000);
    std::uint64_t streamed = 0;
    for (const auto& n : s["stream_counts"]) streamed += n.get<std::uint64_t>();
    EXPECT_EQ(streamed, 3000u);
  }
  const auto& haar = doc["series"][1];
  EXPECT_EQ(haar["label"], "2q haar");
  EXPECT_FALSE(haar["summary"]["line"].is_null());
  EXPECT_NEAR(haar["summary"]["line"]["s_at_qmax"].get<double>(),
              haar["summary"]["line"]["intercept"].get<double>() + haar["summary"]["line"]["slope"].get<double>(),
              1e-12);
}

TEST(RunExperiment, ThreeQubitHaarTable) {
  ExperimentConfig c = config("fig2", 100000);
  c.n_qubits = 3;
  const ExperimentResult r = run_experiment(c);
  const Series* haar = r.find("3q haar");
  ASSERT_NE(haar, nullptr);
  EXPECT_NEAR(haar->summary.mean_q, 1.00, 0.01);
  EXPECT_NEAR(haar->summary.mean_s, 2.48, 0.01);
}

TEST(RunExperiment, PartialInteraction) {
  ExperimentConfig c = config("fig3", 100000);
  c.n_qubits = 4;
  c.interacting = 2;
  const ExperimentResult r = run_experiment(c);
  const Series* haar = r.find("4q k=2 haar");
  ASSERT_NE(haar, nullptr);
  EXPECT_NEAR(haar->summary.mean_s, 1.87, 0.01);
}

TEST(RunExperiment, SixtyFourQubitDickeScaling) {
  ExperimentConfig c = config("fig8", 20000);
  c.n_qubits = 64;
  const ExperimentResult r = run_experiment(c);
  ASSERT_EQ(r.series.size(), 1u);
  ASSERT_TRUE(r.series[0].summary.line.has_value());
  EXPECT_NEAR(r.series[0].summary.line->angle_degrees, 85.0, 1.0);
}

TEST(RunExperiment, StateFamiliesLieOnTheDiagonal) {
  const ExperimentResult r = run_experiment(config("fig1", 41));
  ASSERT_FALSE(r.series.empty());
  int diagonal = 0;
  for (const auto& s : r.series) {
    EXPECT_EQ(s.samples.size(), 41u);
    bool on = true;
    for (const auto& x : s.samples) on = on && std::abs(x.s - x.q) < 1e-9;
    if (s.label == "phi z,i" || s.label == "phi z,z'" || s.label == "phi-x x,i" || s.label == "phi-x x,x'") {
      EXPECT_TRUE(on) << s.label;
      ++diagonal;
    }
    for (const auto& x : s.samples) EXPECT_GE(x.s, x.q - 1e-9) << s.label;
  }
  EXPECT_EQ(diagonal, 4);
}

TEST(RunExperiment, RejectsBadOverrides) {
  ExperimentConfig c = config("sample", 10);
  c.ensemble = "bogus";
  EXPECT_THROW(run_experiment(c), std::invalid_argument);
  c = config("sample", 0);
  EXPECT_THROW(run_experiment(c), std::invalid_argument);
  c = config("fig3", 10);
  c.n_qubits = 3;
  c.interacting = 5;
  EXPECT_THROW(run_experiment(c), std::invalid_argument);
  c = config("fig5", 10);
  c.ensemble = "haar";
  EXPECT_THROW(run_experiment(c), std::invalid_argument);
}

TEST(Cli, SampleWritesOneRow) {
  const Shell r = lab("sample --qubits 2 --ensemble separable --interaction z,2z --samples 1");
  EXPECT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_LT(std::abs(std::stod(rows[1])), 1e-9);
}

TEST(Cli, FilesAndStdout) {
  const std::string csv = testing::TempDir() + "dephase_cli_rows.csv";
  const std::string sum = testing::TempDir() + "dephase_cli_summary.json";
  const Shell r = lab("sample --samples 50 --out " + csv + " --summary " + sum);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(lines(slurp(csv)).size(), 51u);
  const json doc = json::parse(slurp(sum));
  EXPECT_EQ(doc["series"][0]["summary"]["count"], 50);
  const Shell both = lab("sample --samples 5 --out - --summary -");
  EXPECT_EQ(both.code, 2);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(lab("").code, 2);
  EXPECT_EQ(lab("frobnicate").code, 2);
  EXPECT_EQ(lab("sample --ensemble bogus").code, 2);
  EXPECT_EQ(lab("sample --interaction z,q").code, 2);
  EXPECT_EQ(lab("sample --samples notanumber").code, 2);
  EXPECT_EQ(lab("experiment nosuch").code, 2);
  EXPECT_EQ(lab("sample --samples 2", "DEPHASE_LAB_SEED=abc").code, 2);
}

TEST(Cli, InfeasibleSamplerExitsOne) {
  const Shell r = lab("sample --qubits 3 --ensemble energy=0.0:0.000001 --samples 2");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("acceptance rate"), std::string::npos) << r.err;
}

TEST(Cli, SeedFallsBackToEnvironment) {
  const Shell flag = lab("sample --samples 20 --seed 99");
  const Shell env = lab("sample --samples 20", "DEPHASE_LAB_SEED=99");
  const Shell dflt = lab("sample --samples 20");
  const Shell seven = lab("sample --samples 20 --seed 7");
  EXPECT_EQ(flag.code, 0);
  EXPECT_EQ(flag.out, env.out);
  EXPECT_EQ(dflt.out, seven.out);
  EXPECT_NE(flag.out, seven.out);
}

TEST(Cli, ReRunIsByteIdentical) {
  const Shell a = lab("experiment fig2 --qubits 2 --samples 9000 --workers 1");
  const Shell b = lab("experiment fig2 --qubits 2 --samples 9000 --workers 3");
  EXPECT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(lines(a.out).size(), 1u + 2 * 9000);
}

TEST(Cli, ListShowsRegistry) {
  const Shell r = lab("list");
  EXPECT_EQ(r.code, 0);
  EXPECT_GE(lines(r.out).size(), 9u);
  EXPECT_NE(r.out.find("fig8"), std::string::npos);
}

TEST(Cli, VerifyZeroToleranceNamesFirstFailure) {
  const Shell r = lab("verify --properties-only --tolerance-scale 0 --brief");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("first failure:"), std::string::npos) << r.out;
}

TEST(Cli, VerifyPropertiesOnlyPasses) {
  const Shell r = lab("verify --properties-only --brief");
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 2u) << r.out;
  for (const auto& row : rows) EXPECT_NE(row.find(": PASS"), std::string::npos) << row;
}
