#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace dephase {

struct ScatterSample {
  double q = 0.0;  // initial global entanglement
  double s = 0.0;  // final entropy, bits
};

/// Streaming first and second moments of (q, s); shards merge associatively.
class MomentAccumulator {
 public:
  void add(double q, double s);
  void add(const ScatterSample& x) { add(x.q, x.s); }
  void merge(const MomentAccumulator& other);

  std::uint64_t count() const { return n_; }
  double mean_q() const { return mean_q_; }
  double mean_s() const { return mean_s_; }
  /// Population variances and covariance (divide by N).
  double var_q() const;
  double var_s() const;
  double cov_qs() const;
  /// Absent when either coordinate has zero variance.
  std::optional<double> pearson() const;

 private:
  std::uint64_t n_ = 0;
  double mean_q_ = 0.0;
  double mean_s_ = 0.0;
  double m2_q_ = 0.0;
  double m2_s_ = 0.0;
  double c_qs_ = 0.0;
};

struct LineFit {
  double intercept = 0.0;  // S at Q = 0
  double slope = 0.0;
  double angle_degrees = 0.0;
  double s_at_qmax = 0.0;
};

struct BinnedPoint {
  double center = 0.0;
  double mean_s = 0.0;
  std::uint64_t count = 0;
};

struct BinOptions {
  double width = 0.05;
  std::uint64_t min_count = 200;
};

struct RunSummary {
  std::uint64_t count = 0;
  double mean_q = 0.0;
  double mean_s = 0.0;
  double var_q = 0.0;
  double var_s = 0.0;
  std::optional<double> pearson;
  /// Line through (0, separable mean) and (mean_q, mean_s).
  std::optional<LineFit> line;
  std::vector<BinnedPoint> binned_curve;
  std::optional<double> entanglement_fraction;
};

LineFit line_through(double intercept, double slope, double q_max);

/// Mean-point line; absent when mean_q is 0.
std::optional<LineFit> mean_point_line(double mean_q, double mean_s, double separable_mean_s,
                                       double q_max);

/// Least-squares line s = a + b q; absent when var_q is 0.
std::optional<LineFit> regression_line(const MomentAccumulator& acc, double q_max);
std::optional<LineFit> regression_line(std::span<const ScatterSample> samples, double q_max);

std::optional<double> pearson(std::span<const ScatterSample> samples);

/// Bins [k w, (k+1) w) of q; emits bins holding at least min_count samples.
std::vector<BinnedPoint> binned_means(std::span<const ScatterSample> samples, double bin_width,
                                      std::uint64_t min_count);

/// (mean_s - mean_s_q0) / mean_s; throws std::invalid_argument if mean_s <= 0.
double entanglement_fraction(double mean_s, double mean_s_q0);

/// atan(0.56) in degrees: the slope bound from S <= n and S(Q=0) ~ 0.72 n.
double max_angle_bound(int n_qubits);

/// Throws std::invalid_argument for fewer than 2 samples or non-finite values.
RunSummary summarize(std::span<const ScatterSample> samples, double separable_mean_s, double q_max,
                     const BinOptions& bins = {});

}  // namespace dephase
