#include "dephase/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace dephase {

namespace {

double degrees(double radians) { return radians * 180.0 / std::numbers::pi; }

MomentAccumulator accumulate(std::span<const ScatterSample> samples) {
  MomentAccumulator acc;
  for (const auto& x : samples) acc.add(x);
  return acc;
}

}  // namespace

void MomentAccumulator::add(double q, double s) {
  ++n_;
  const double n = static_cast<double>(n_);
  const double dq = q - mean_q_;
  const double ds = s - mean_s_;
  mean_q_ += dq / n;
  mean_s_ += ds / n;
  m2_q_ += dq * (q - mean_q_);
  m2_s_ += ds * (s - mean_s_);
  c_qs_ += dq * (s - mean_s_);
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double n = na + nb;
  const double dq = other.mean_q_ - mean_q_;
  const double ds = other.mean_s_ - mean_s_;
  m2_q_ += other.m2_q_ + dq * dq * na * nb / n;
  m2_s_ += other.m2_s_ + ds * ds * na * nb / n;
  c_qs_ += other.c_qs_ + dq * ds * na * nb / n;
  mean_q_ += dq * nb / n;
  mean_s_ += ds * nb / n;
  n_ += other.n_;
}

double MomentAccumulator::var_q() const { return n_ ? std::max(0.0, m2_q_ / static_cast<double>(n_)) : 0.0; }
double MomentAccumulator::var_s() const { return n_ ? std::max(0.0, m2_s_ / static_cast<double>(n_)) : 0.0; }
double MomentAccumulator::cov_qs() const { return n_ ? c_qs_ / static_cast<double>(n_) : 0.0; }

std::optional<double> MomentAccumulator::pearson() const {
  if (n_ < 2 || m2_q_ <= 0.0 || m2_s_ <= 0.0) return std::nullopt;
  return std::clamp(c_qs_ / std::sqrt(m2_q_ * m2_s_), -1.0, 1.0);
}

LineFit line_through(double intercept, double slope, double q_max) {
  return {intercept, slope, degrees(std::atan(slope)), intercept + slope * q_max};
}

std::optional<LineFit> mean_point_line(double mean_q, double mean_s, double separable_mean_s,
                                       double q_max) {
  if (mean_q == 0.0) return std::nullopt;
  return line_through(separable_mean_s, (mean_s - separable_mean_s) / mean_q, q_max);
}

std::optional<LineFit> regression_line(const MomentAccumulator& acc, double q_max) {
  if (acc.count() < 2 || acc.var_q() <= 0.0) return std::nullopt;
  const double slope = acc.cov_qs() / acc.var_q();
  return line_through(acc.mean_s() - slope * acc.mean_q(), slope, q_max);
}

std::optional<LineFit> regression_line(std::span<const ScatterSample> samples, double q_max) {
  return regression_line(accumulate(samples), q_max);
}

std::optional<double> pearson(std::span<const ScatterSample> samples) {
  return accumulate(samples).pearson();
}

std::vector<BinnedPoint> binned_means(std::span<const ScatterSample> samples, double bin_width,
                                      std::uint64_t min_count) {
  if (!(bin_width > 0.0)) throw std::invalid_argument("bin width must be positive");
  std::map<long long, std::pair<double, std::uint64_t>> bins;
  for (const auto& x : samples) {
    auto& [sum, count] = bins[static_cast<long long>(std::floor(x.q / bin_width))];
    sum += x.s;
    ++count;
  }
  std::vector<BinnedPoint> out;
  for (const auto& [k, acc] : bins) {
    if (acc.second < min_count || acc.second == 0) continue;
    out.push_back({(static_cast<double>(k) + 0.5) * bin_width, acc.first / static_cast<double>(acc.second),
                   acc.second});
  }
  return out;
}

double entanglement_fraction(double mean_s, double mean_s_q0) {
  if (!(mean_s > 0.0)) throw std::invalid_argument("entanglement fraction needs mean_s > 0");
  return (mean_s - mean_s_q0) / mean_s;
}

double max_angle_bound(int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("max_angle_bound needs n >= 1");
  const double n = n_qubits;
  return degrees(std::atan((n - 0.72 * n) / (n / 2.0)));
}

RunSummary summarize(std::span<const ScatterSample> samples, double separable_mean_s, double q_max,
                     const BinOptions& bins) {
  if (samples.size() < 2) throw std::invalid_argument("summarize needs at least 2 samples");
  for (const auto& x : samples) {
    if (!std::isfinite(x.q) || !std::isfinite(x.s)) throw std::invalid_argument("non-finite sample");
  }
  const MomentAccumulator acc = accumulate(samples);
  RunSummary out;
  out.count = acc.count();
  out.mean_q = acc.mean_q();
  out.mean_s = acc.mean_s();
  out.var_q = acc.var_q();
  out.var_s = acc.var_s();
  out.pearson = acc.pearson();
  out.line = mean_point_line(out.mean_q, out.mean_s, separable_mean_s, q_max);
  out.binned_curve = binned_means(samples, bins.width, bins.min_count);
  if (out.mean_s > 0.0) out.entanglement_fraction = entanglement_fraction(out.mean_s, separable_mean_s);
  return out;
}

}  // namespace dephase
