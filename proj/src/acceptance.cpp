#include "dephase/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "dephase/experiments.hpp"
#include "dephase/interaction.hpp"
#include "dephase/measures.hpp"
#include "dephase/runner.hpp"
#include "dephase/sampling.hpp"
#include "dephase/stats.hpp"

namespace dephase {

namespace {

std::string fmt(double v, int precision = 6) {
  std::ostringstream out;
  out.precision(precision);
  out << v;
  return out.str();
}

double binary_entropy(double p) {
  const double w[2] = {p, 1.0 - p};
  return shannon_entropy_bits(w);
}

class Builder {
 public:
  Builder(CriterionReport& report, double scale) : report_(report), scale_(scale) {}

  void within(std::string id, double target, double measured, double tolerance) {
    add(std::move(id), target, measured, tolerance, Check::Relation::Within,
        std::abs(measured - target) <= tolerance * scale_);
  }
  void below(std::string id, double target, double measured) {
    add(std::move(id), target, measured, 0.0, Check::Relation::Below, measured < target);
  }
  void at_most(std::string id, double target, double measured, double tolerance) {
    add(std::move(id), target, measured, tolerance, Check::Relation::AtMost,
        measured <= target + tolerance * scale_);
  }
  void note(std::string text) { report_.notes.push_back(std::move(text)); }

 private:
  void add(std::string id, double target, double measured, double tolerance, Check::Relation rel,
           bool pass) {
    report_.checks.push_back({std::move(id), target, measured, tolerance, rel, pass && std::isfinite(measured)});
  }

  CriterionReport& report_;
  double scale_;
};

std::string nq(int n) { return std::to_string(n) + "q"; }

// Haar and separable runs shared by the first four criteria.
struct HaarTable {
  std::vector<int> ks;  // interacting counts; the last one is n
  EnsembleRun haar;
  EnsembleRun separable;

  std::size_t full() const { return ks.size() - 1; }
  std::size_t index_of(int k) const {
    return static_cast<std::size_t>(std::find(ks.begin(), ks.end(), k) - ks.begin());
  }
};

class Suite {
 public:
  Suite(const VerifyOptions& options, std::ostream* progress) : opt_(options), progress_(progress) {}

  std::vector<CriterionReport> run() {
    struct Item {
      int number;
      const char* title;
      bool sampling;
      std::function<void(Builder&)> body;
    };
    const std::vector<Item> items{
        {1, "Haar ensemble means and variances", true, [this](Builder& b) { haar_table(b); }},
        {2, "Haar Pearson coefficients", true, [this](Builder& b) { haar_pearson(b); }},
        {3, "Haar mean-point line angles", true, [this](Builder& b) { haar_angles(b); }},
        {4, "partial interaction", true, [this](Builder& b) { partial(b); }},
        {5, "equal-occupation ensembles", true, [this](Builder& b) { energy(b); }},
        {6, "generalized Dicke ensembles", true, [this](Builder& b) { dicke(b); }},
        {7, "closed-form spot checks", false, [this](Builder& b) { closed_forms(b); }},
        {8, "property suites", false, [this](Builder& b) { properties(b); }},
        {9, "two-qubit boundary states", true, [this](Builder& b) { boundary(b); }},
    };
    std::vector<CriterionReport> out;
    for (const auto& item : items) {
      if (opt_.properties_only && item.sampling) continue;
      if (!opt_.only.empty() && !opt_.only.count(item.number)) continue;
      CriterionReport report;
      report.number = item.number;
      report.title = item.title;
      if (progress_) *progress_ << "running criterion " << item.number << " (" << item.title << ")\n" << std::flush;
      const auto start = std::chrono::steady_clock::now();
      Builder b(report, opt_.tolerance_scale);
      item.body(b);
      report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      out.push_back(std::move(report));
    }
    return out;
  }

 private:
  std::uint64_t seed(const std::string& tag) const { return derive_seed(opt_.seed, "acceptance/" + tag); }

  EnsembleSpec spec(EnsembleSpec::Kind kind, int n, std::uint64_t count, const std::string& tag) const {
    EnsembleSpec s;
    s.kind = kind;
    s.n_qubits = n;
    s.count = count;
    s.seed = seed(tag);
    return s;
  }

  const HaarTable& haar(int n) {
    auto it = haar_.find(n);
    if (it != haar_.end()) return it->second;
    HaarTable t;
    if (n <= 4) {
      for (int k = 1; k <= n; ++k) t.ks.push_back(k);
    } else {
      t.ks.push_back(n);
    }
    std::vector<Observable> obs;
    for (int k : t.ks) obs.push_back({"z" + std::to_string(k), InteractionSpec::distinct('z', n, k)});
    t.haar = run_ensemble(spec(EnsembleSpec::Kind::Haar, n, opt_.haar_samples, "haar/" + nq(n)), obs, opt_.workers);
    t.separable = run_ensemble(spec(EnsembleSpec::Kind::Separable, n, opt_.haar_samples, "separable/" + nq(n)),
                               obs, opt_.workers);
    return haar_.emplace(n, std::move(t)).first->second;
  }

  const EnsembleRun& dicke_run(int n, int big_n) {
    const auto key = std::pair{n, big_n};
    auto it = dicke_.find(key);
    if (it != dicke_.end()) return it->second;
    std::vector<Observable> obs{{"z", InteractionSpec::distinct('z', n)}};
    if (n <= 12) obs.push_back({"x", InteractionSpec::distinct('x', n)});
    EnsembleSpec s = spec(EnsembleSpec::Kind::Dicke, n, opt_.dicke_samples,
                          "dicke/" + nq(n) + "/" + std::to_string(big_n));
    s.excitations = big_n;
    return dicke_.emplace(key, run_ensemble(s, obs, opt_.workers)).first->second;
  }

  void haar_table(Builder& b) {
    const double s_target[] = {1.56, 2.48, 3.43, 4.41, 5.40};
    const double q_target[] = {0.40, 1.00, 1.65, 2.27, 2.86};
    const double vs_target[] = {0.076, 0.053, 0.031, 0.017, 0.009};
    const double vq_target[] = {0.068, 0.054, 0.024, 0.008, 0.002};
    const double sep_target[] = {1.44, 2.16, 2.89, 3.61, 4.33};
    for (int n = 2; n <= 6; ++n) {
      const auto& t = haar(n);
      const auto m = t.haar.moments(t.full());
      const auto sep = t.separable.moments(t.full());
      const int i = n - 2;
      b.within(nq(n) + " mean S", s_target[i], m.mean_s(), 0.01);
      b.within(nq(n) + " mean Q", q_target[i], m.mean_q(), 0.01);
      b.within(nq(n) + " Var S", vs_target[i], m.var_s(), 0.005);
      b.within(nq(n) + " Var Q", vq_target[i], m.var_q(), 0.005);
      b.within(nq(n) + " separable mean S", sep_target[i], sep.mean_s(), 0.01);
    }
    b.note(std::to_string(opt_.haar_samples) + " Haar and separable samples per size, distinct sigma_z couplings");
  }

  void haar_pearson(Builder& b) {
    const double target[] = {0.27, 0.30, 0.28, 0.25, 0.21};
    for (int n = 2; n <= 6; ++n) {
      const auto& t = haar(n);
      b.within(nq(n) + " Pearson", target[n - 2], t.haar.moments(t.full()).pearson().value_or(NAN), 0.02);
    }
  }

  void haar_angles(Builder& b) {
    const double angle_target[] = {16, 17, 18, 20, 21};
    const double smax_target[] = {1.74, 2.63, 3.55, 4.49, 5.45};
    for (int n = 2; n <= 6; ++n) {
      const auto& t = haar(n);
      const auto m = t.haar.moments(t.full());
      const auto line = mean_point_line(m.mean_q(), m.mean_s(), t.separable.moments(t.full()).mean_s(), n / 2.0);
      const double angle = line ? line->angle_degrees : NAN;
      b.within(nq(n) + " angle", angle_target[n - 2], angle, 1.0);
      b.below(nq(n) + " angle below bound", max_angle_bound(n), angle);
      b.within(nq(n) + " S at Q_max", smax_target[n - 2], line ? line->s_at_qmax : NAN, 0.02);
    }
  }

  void partial(Builder& b) {
    struct Row {
      int k, n;
      double s;
    };
    const Row rows[] = {{1, 2, 0.84}, {1, 3, 0.92}, {1, 4, 0.96}, {2, 2, 1.56}, {2, 3, 1.76},
                        {2, 4, 1.87}, {3, 3, 2.48}, {3, 4, 2.71}, {4, 4, 3.43}};
    for (const auto& row : rows) {
      const auto& t = haar(row.n);
      b.within(nq(row.n) + " k=" + std::to_string(row.k) + " mean S", row.s,
               t.haar.moments(t.index_of(row.k)).mean_s(), 0.01);
    }
    const double angle_target[] = {8, 14, 18, 18};
    const double fraction_target[] = {0.25, 0.23, 0.20, 0.16};
    const auto& t = haar(4);
    for (int k = 1; k <= 4; ++k) {
      const auto m = t.haar.moments(t.index_of(k));
      const double ref = t.separable.moments(t.index_of(k)).mean_s();
      const auto line = mean_point_line(m.mean_q(), m.mean_s(), ref, 2.0);
      b.within("4q k=" + std::to_string(k) + " angle", angle_target[k - 1], line ? line->angle_degrees : NAN, 1.0);
      b.within("4q k=" + std::to_string(k) + " fraction", fraction_target[k - 1],
               entanglement_fraction(m.mean_s(), ref), 0.01);
    }
  }

  void energy(Builder& b) {
    struct Row {
      int n;
      double e, delta, q, sz, sx, tol;
    };
    const Row rows[] = {{2, 0.5, 0.01, 0.66, 1.72, 1.5, 0.03},  {2, 0.2, 0.01, 0.35, 1.27, 1.66, 0.03},
                        {2, 0.1, 0.01, 0.18, 0.81, 1.81, 0.03},  {2, 0.05, 0.01, 0.09, 0.49, 1.9, 0.03},
                        {3, 0.5, 0.02, 1.2, 2.65, 2.46, 0.05}};
    for (const auto& row : rows) {
      EnsembleSpec s = spec(EnsembleSpec::Kind::EnergyConstrained, row.n, opt_.energy_accepted,
                            "energy/" + nq(row.n) + "/" + fmt(row.e));
      s.energy = row.e;
      s.delta = row.delta;
      const std::vector<Observable> obs{{"z", InteractionSpec::distinct('z', row.n)},
                                        {"x", InteractionSpec::distinct('x', row.n)}};
      const auto run = run_ensemble(s, obs, opt_.workers);
      const std::string id = nq(row.n) + " E=" + fmt(row.e);
      const auto z = run.moments(0), x = run.moments(1);
      b.within(id + " mean Q", row.q, z.mean_q(), row.tol);
      b.within(id + " mean S_z", row.sz, z.mean_s(), row.tol);
      b.within(id + " mean S_x", row.sx, x.mean_s(), row.tol);
      b.note(id + ": accepted " + std::to_string(run.size()) + " of " + std::to_string(run.attempts) +
             " draws (rate " + fmt(static_cast<double>(run.size()) / static_cast<double>(run.attempts), 3) +
             ") with max_i |<E_i> - E| <= " + fmt(row.delta) + "; offsets of the means from targets "
             "computed with a narrower window show up in the checks above");
    }
  }

  void dicke(Builder& b) {
    {
      const auto& run = dicke_run(4, 1);
      const auto z = run.moments(0), x = run.moments(1);
      const auto lz = regression_line(z, 2.0), lx = regression_line(x, 2.0);
      b.within("4q N=1 angle sigma_z", 52, lz ? lz->angle_degrees : NAN, 1.0);
      b.within("4q N=1 correlation sigma_z", 0.98, z.pearson().value_or(NAN), 0.01);
      b.within("4q N=1 angle sigma_x", -18, lx ? lx->angle_degrees : NAN, 1.0);
      b.within("4q N=1 correlation sigma_x", -0.39, x.pearson().value_or(NAN), 0.03);
    }
    struct Column {
      int n, big_n;
      double q, sx, sz;
    };
    const Column cols[] = {{4, 1, 1.20, 3.56, 1.56}, {4, 2, 1.71, 3.51, 2.09}, {6, 1, 1.43, 5.51, 2.09},
                           {6, 2, 2.50, 5.44, 3.35}, {6, 3, 2.86, 5.43, 3.75}};
    for (const auto& c : cols) {
      const auto& run = dicke_run(c.n, c.big_n);
      const std::string id = nq(c.n) + " N=" + std::to_string(c.big_n);
      b.within(id + " mean Q", c.q, run.moments(0).mean_q(), 0.02);
      b.within(id + " mean S_x", c.sx, run.moments(1).mean_s(), 0.02);
      b.within(id + " mean S_z", c.sz, run.moments(0).mean_s(), 0.02);
    }
    const int sizes[] = {2, 4, 8, 16, 32, 64};
    const double angles[] = {44, 52, 63, 74, 81, 85};
    const double corr[] = {1, 0.98, 0.96, 0.95, 0.94, 0.93};
    for (int i = 0; i < 6; ++i) {
      const int n = sizes[i];
      const auto m = dicke_run(n, 1).moments(0);
      const auto line = regression_line(m, n / 2.0);
      b.within(nq(n) + " N=1 scaling angle", angles[i], line ? line->angle_degrees : NAN, 1.0);
      b.within(nq(n) + " N=1 scaling correlation", corr[i], m.pearson().value_or(NAN), 0.01);
    }
    b.note("angles are least-squares fits of S_z on Q with unit aspect; " + std::to_string(opt_.dicke_samples) +
           " samples per column");
    b.note("2q N=1: S = h(p) and Q = 4p(1-p) with p uniform on [0,1], so the fitted angle is a fixed number "
           "near 42.0 degrees for any sample size");
  }

  void closed_forms(Builder& b) {
    auto symmetric = [](int n, int big_n) {
      const auto support = dicke_support(n, big_n);
      std::vector<cplx> amps(support.size(), cplx{1.0 / std::sqrt(static_cast<double>(support.size())), 0.0});
      return PureState::from_support(n, support, amps);
    };
    const auto z4 = InteractionSpec::distinct('z', 4), x4 = InteractionSpec::distinct('x', 4);
    const PureState d1 = symmetric(4, 1), d2 = symmetric(4, 2);
    b.within("Dicke N=1 Q", 1.5, global_entanglement(d1), 1e-9);
    b.within("Dicke N=1 S_z", 2.0, final_entropy(d1, z4), 1e-9);
    b.within("Dicke N=2 Q", 2.0, global_entanglement(d2), 1e-9);
    b.within("Dicke N=2 S_z", std::log2(6.0), final_entropy(d2, z4), 1e-9);
    b.within("Dicke N=1 S_x", 3.0, final_entropy(d1, x4), 1e-9);
    b.within("Dicke N=2 S_x", 3.0 - std::log(3.0) / std::log(4.0), final_entropy(d2, x4), 1e-9);

    double ghz_dev = 0.0;
    for (int n = 2; n <= 8; ++n) {
      std::vector<cplx> amps(std::size_t{1} << n);
      amps.front() = amps.back() = 1.0 / std::sqrt(2.0);
      ghz_dev = std::max(ghz_dev, std::abs(final_entropy(PureState::dense(n, amps), InteractionSpec::distinct('z', n)) - 1.0));
    }
    b.within("GHZ S_N, n=2..8 (max deviation from 1)", 0.0, ghz_dev, 1e-9);

    const std::pair<int, int> shapes[] = {{4, 1}, {4, 2}, {6, 1}, {8, 1}};
    for (auto [n, big_n] : shapes) {
      Rng rng(seed("closed-form"), static_cast<std::uint64_t>(n * 10 + big_n));
      double dev = 0.0;
      for (int i = 0; i < 1000; ++i) {
        const PureState state = dicke_generalized(n, big_n, rng);
        const auto support = dicke_support(n, big_n);
        std::vector<cplx> coeffs;
        for (BasisIndex j : support) coeffs.push_back(state.amplitude(j));
        dev = std::max(dev, std::abs(dicke_q_closed_form(coeffs, n, big_n) - global_entanglement(state)));
      }
      b.within("closed-form Q vs reduced matrices, " + nq(n) + " N=" + std::to_string(big_n) + " (max deviation)",
               0.0, dev, 1e-9);
    }
  }

  static QubitOperator random_operator(Rng& rng) {
    const double z = 2.0 * rng.uniform() - 1.0, phi = rng.angle();
    const double r = 0.2 + 1.8 * rng.uniform();
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {2.0 * rng.uniform() - 1.0, r * s * std::cos(phi), r * s * std::sin(phi), r * z};
  }

  void properties(Builder& b) {
    const std::uint64_t pairs = opt_.property_samples;
    {
      Rng rng(seed("pair-inequality"), 0);
      std::uint64_t one_bad = 0, two_bad = 0, mono_bad = 0;
      for (std::uint64_t i = 0; i < pairs; ++i) {
        const PureState state = haar_state(2, rng);
        const QubitOperator a = random_operator(rng);
        QubitOperator c = random_operator(rng);
        while (std::abs(c.pauli_norm() - a.pauli_norm()) < 1e-3) c = random_operator(rng);
        const double se = entanglement_entropy(state);
        const double s_one = final_entropy(state, InteractionSpec{{a, std::nullopt}});
        const double s_two = final_entropy(state, InteractionSpec{{a, c}});
        one_bad += s_one < se - 1e-9;
        two_bad += s_two < se - 1e-9;
        mono_bad += s_two < s_one - 1e-9;
      }
      b.at_most("S_N >= S_E violations, one qubit coupled", 0, static_cast<double>(one_bad), 0);
      b.at_most("S_N >= S_E violations, both qubits coupled", 0, static_cast<double>(two_bad), 0);
      b.at_most("one-vs-two coupling monotonicity violations", 0, static_cast<double>(mono_bad), 0);
      b.note(std::to_string(pairs) + " random (state, coupling) pairs with 1e-9 slack");
    }
    {
      const double e = 0.3;
      for (int n = 2; n <= 4; ++n) {
        EnergyConstrainedSampler sampler(n, e, 0.05, kDefaultMaxAttempts, true);
        Rng rng(seed("pinned-constancy"), static_cast<std::uint64_t>(n));
        InteractionSpec spec = InteractionSpec::distinct('z', n, 1);
        MomentAccumulator acc;
        double dev = 0.0;
        for (int i = 0; i < 1000; ++i) {
          const PureState state = sampler.draw(rng);
          const double s = final_entropy(state, spec);
          acc.add(global_entanglement(state), s);
          dev = std::max(dev, std::abs(s - binary_entropy(e)));
        }
        b.below(nq(n) + " one-qubit sigma_z entropy variance at E=0.3", 1e-18, acc.var_s());
        b.within(nq(n) + " one-qubit sigma_z entropy vs h(E) (max deviation)", 0.0, dev, 1e-12);
      }
    }
    {
      Rng rng(seed("local-unitary"), 0);
      double dev = 0.0;
      for (int n = 2; n <= 5; ++n) {
        for (int i = 0; i < 200; ++i) {
          const PureState state = haar_state(n, rng);
          Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(1, 1);
          for (int q = 0; q < n; ++q) {
            const Eigen::Matrix2cd f = random_su2(rng);
            Eigen::MatrixXcd next(u.rows() * 2, u.cols() * 2);
            for (Eigen::Index r = 0; r < u.rows(); ++r) {
              for (Eigen::Index c = 0; c < u.cols(); ++c) next.block<2, 2>(2 * r, 2 * c) = u(r, c) * f;
            }
            u = std::move(next);
          }
          const Eigen::VectorXcd v = u * state.to_vector();
          const PureState rotated = PureState::dense(n, std::vector<cplx>(v.data(), v.data() + v.size()));
          dev = std::max(dev, std::abs(global_entanglement(rotated) - global_entanglement(state)));
        }
      }
      b.within("Q under local unitaries (max deviation)", 0.0, dev, 1e-10);
    }
    {
      Rng rng(seed("clusters"), 0);
      const int sizes[] = {2, 1, 3};
      const InteractionSpec whole = InteractionSpec::distinct('z', 6);
      double dq = 0.0, ds = 0.0;
      for (int i = 0; i < 200; ++i) {
        double q_sum = 0.0, s_sum = 0.0;
        std::optional<PureState> product;
        int offset = 0;
        for (int size : sizes) {
          const PureState part = haar_state(size, rng);
          InteractionSpec sub;
          sub.per_qubit.assign(whole.per_qubit.begin() + offset, whole.per_qubit.begin() + offset + size);
          q_sum += global_entanglement(part);
          s_sum += final_entropy(part, sub);
          product = product ? tensor(*product, part) : part;
          offset += size;
        }
        dq = std::max(dq, std::abs(global_entanglement(*product) - q_sum));
        ds = std::max(ds, std::abs(final_entropy(*product, whole) - s_sum));
      }
      b.within("Q additivity over clusters 2+1+3 (max deviation)", 0.0, dq, 1e-10);
      b.within("S_N additivity over clusters 2+1+3 (max deviation)", 0.0, ds, 1e-9);
    }
    {
      Rng rng(seed("idempotence"), 0);
      double dev = 0.0, scale_dev = 0.0;
      for (int i = 0; i < 200; ++i) {
        const int n = 2 + i % 2;
        InteractionSpec spec;
        for (int q = 0; q < n; ++q) {
          if (rng.uniform() < 0.25) {
            spec.per_qubit.push_back(std::nullopt);
          } else {
            spec.per_qubit.push_back(random_operator(rng));
          }
        }
        const PureState state = haar_state(n, rng);
        const DensityMatrix once = dephase_final(state, spec);
        const DensityMatrix twice = dephase_matrix(once, spec);
        dev = std::max(dev, (twice.matrix() - once.matrix()).cwiseAbs().maxCoeff());
        InteractionSpec scaled = spec;
        const double c = 0.1 + 20.0 * rng.uniform();
        for (auto& op : scaled.per_qubit) {
          if (op) *op = {op->a0 * c, op->ax * c, op->ay * c, op->az * c};
        }
        scale_dev = std::max(scale_dev, std::abs(final_entropy(state, scaled) - final_entropy(state, spec)));
      }
      b.within("dephasing idempotence (max entry deviation)", 0.0, dev, 1e-12);
      b.within("coupling-scale invariance of S_N (max deviation)", 0.0, scale_dev, 1e-10);
    }
    {
      Rng rng(seed("evolve"), 0);
      double at_zero = 0.0, constancy = 0.0;
      const char* specs[] = {"z,z", "x,x", "x,i,x", "0.5:1:0:1,0:1:0:1"};
      EvolutionParams params;
      for (const char* text : specs) {
        const InteractionSpec spec = parse_interaction(text);
        const PointerBasis basis(spec);
        const Eigen::MatrixXcd f = basis.frame_unitary();
        const auto& label = basis.group_labels();
        for (int i = 0; i < 20; ++i) {
          const PureState state = haar_state(spec.n_qubits(), rng);
          const DensityMatrix rho0 = evolve(state, spec, 0.0, params);
          at_zero = std::max(at_zero, (rho0.matrix() - DensityMatrix::projector(state).matrix()).cwiseAbs().maxCoeff());
          const std::vector<cplx> c = basis.coefficients(state);
          for (int k = 0; k < 10; ++k) {
            const double t = 50.0 * rng.uniform();
            const Eigen::MatrixXcd m = f.adjoint() * evolve(state, spec, t, params).matrix() * f;
            for (Eigen::Index r = 0; r < m.rows(); ++r) {
              for (Eigen::Index s = 0; s < m.cols(); ++s) {
                if (label[r] == label[s]) constancy = std::max(constancy, std::abs(m(r, s) - c[r] * std::conj(c[s])));
              }
            }
          }
        }
      }
      b.within("evolve(t=0) vs initial projector (max entry deviation)", 0.0, at_zero, 1e-12);
      b.within("same-class pointer entries over time (max deviation)", 0.0, constancy, 1e-12);
    }
  }

  void boundary(Builder& b) {
    const InteractionSpec z2 = InteractionSpec::distinct('z', 2);
    for (double e : {0.1, 0.2, 0.5}) {
      const double top = std::min(e, 1.0 - e);
      const auto steps = static_cast<int>(std::llround(top / 1e-4));
      double best_x = 0.0, best_s = -1.0;
      for (int k = 0; k <= steps; ++k) {
        const double x = std::min(top, k * 1e-4);
        const double s = final_entropy(boundary_state_2q(e, x), z2);
        if (s > best_s) {
          best_s = s;
          best_x = x;
        }
      }
      const std::string id = "E=" + fmt(e);
      b.within(id + " argmax x of boundary S_z", e * (1.0 - e), best_x, 1e-4);
      EnergyConstrainedSampler sampler(2, e, 0.01, kDefaultMaxAttempts, true);
      Rng rng(seed("boundary/" + id), 0);
      double worst = -1.0;
      for (int i = 0; i < 1000; ++i) worst = std::max(worst, final_entropy(sampler.draw(rng), z2));
      b.at_most(id + " max sampled S_z vs boundary maximum", best_s, worst, 1e-9);
    }
    b.note("sampled states are rescaled to exact occupations <E_i> = E, phases kept");
  }

  const VerifyOptions& opt_;
  std::ostream* progress_;
  std::map<int, HaarTable> haar_;
  std::map<std::pair<int, int>, EnsembleRun> dicke_;
};

const char* relation_text(Check::Relation r) {
  switch (r) {
    case Check::Relation::Within: return "+/-";
    case Check::Relation::Below: return "<";
    case Check::Relation::AtMost: return "<=";
  }
  return "?";
}

}  // namespace

bool CriterionReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check* CriterionReport::first_failure() const {
  for (const auto& c : checks) {
    if (!c.pass) return &c;
  }
  return nullptr;
}

std::vector<CriterionReport> run_acceptance(const VerifyOptions& options, std::ostream* progress) {
  if (!(options.tolerance_scale >= 0.0)) throw std::invalid_argument("tolerance scale must be >= 0");
  Suite suite(options, progress);
  return suite.run();
}

bool all_passed(const std::vector<CriterionReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const CriterionReport& r) { return r.pass(); });
}

void print_report(const std::vector<CriterionReport>& reports, std::ostream& out, bool details) {
  for (const auto& r : reports) {
    const auto passed = std::count_if(r.checks.begin(), r.checks.end(), [](const Check& c) { return c.pass; });
    out << "criterion " << r.number << ": " << (r.pass() ? "PASS" : "FAIL") << "  " << r.title << " ("
        << passed << "/" << r.checks.size() << " checks";
    if (const Check* f = r.first_failure()) out << "; first failure: " << f->id;
    out << ")\n";
  }
  if (!details) return;
  char line[512];
  for (const auto& r : reports) {
    out << "\n[criterion " << r.number << "] " << r.title << "  (" << fmt(r.wall_seconds, 3) << " s)\n";
    for (const auto& c : r.checks) {
      if (c.relation == Check::Relation::Below) {
        std::snprintf(line, sizeof line, "  %-4s %-58s measured %-12.6g %s %.6g\n", c.pass ? "ok" : "FAIL",
                      c.id.c_str(), c.measured, relation_text(c.relation), c.target);
      } else {
        std::snprintf(line, sizeof line, "  %-4s %-58s measured %-12.6g target %-10.6g %s %.3g\n",
                      c.pass ? "ok" : "FAIL", c.id.c_str(), c.measured, c.target, relation_text(c.relation),
                      c.tolerance);
      }
      out << line;
    }
    for (const auto& n : r.notes) out << "  note: " << n << "\n";
  }
}

}  // namespace dephase
