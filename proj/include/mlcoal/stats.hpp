#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

namespace mlcoal {

/// Mergeable count/mean/M2/min/max accumulator.
class SummaryStats {
 public:
  void add(double x) {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
    min_ = std::min(min_, x);
    max_ = std::max(max_, x);
  }

  /// Chan et al. pairwise combination.
  void merge(const SummaryStats& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(count_), nb = static_cast<double>(other.count_);
    const double delta = other.mean_ - mean_;
    const double total = na + nb;
    mean_ += delta * nb / total;
    m2_ += other.m2_ + delta * delta * na * nb / total;
    count_ += other.count_;
    min_ = std::min(min_, other.min_);
    max_ = std::max(max_, other.max_);
  }

  std::uint64_t count() const { return count_; }
  double mean() const { return mean_; }
  double m2() const { return m2_; }
  double min() const { return min_; }
  double max() const { return max_; }
  double variance() const { return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0; }
  double stddev() const { return std::sqrt(variance()); }
  double stderr_mean() const { return count_ > 0 ? stddev() / std::sqrt(static_cast<double>(count_)) : 0.0; }

  /// Normal-approximation interval mean +- z * stderr.
  std::pair<double, double> confidence_interval(double z = 1.959963984540054) const {
    return {mean_ - z * stderr_mean(), mean_ + z * stderr_mean()};
  }

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double min_ = std::numeric_limits<double>::infinity();
  double max_ = -std::numeric_limits<double>::infinity();
};

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool rejected = false;
  std::size_t degrees_of_freedom = 0;
};

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2).
inline double kolmogorov_survival(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
inline TestResult ks_two_sample(std::span<const double> a, std::span<const double> b, double level) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  const double ne = nx * ny / (nx + ny);
  const double sq = std::sqrt(ne);
  TestResult r;
  r.statistic = d;
  r.p_value = d == 0.0 ? 1.0 : kolmogorov_survival((sq + 0.12 + 0.11 / sq) * d);
  r.rejected = r.p_value < level;
  return r;
}

struct ChiSquareResult : TestResult {
  std::vector<double> pooled_observed;
  std::vector<double> pooled_expected;
};

/// Pearson goodness of fit. Adjacent bins are pooled left to right until each
/// pooled bin expects at least `min_expected` counts; a short remainder joins
/// the last pooled bin.
inline ChiSquareResult chi_square_gof(std::span<const double> observed, std::span<const double> probabilities,
                                      double level, double min_expected = 5.0) {
  if (observed.size() != probabilities.size() || observed.empty())
    throw std::invalid_argument("chi_square_gof: size mismatch");
  double total = 0.0, mass = 0.0;
  for (double o : observed) total += o;
  for (double p : probabilities) {
    if (p < 0) throw std::invalid_argument("chi_square_gof: negative probability");
    mass += p;
  }
  if (total <= 0 || mass <= 0) throw std::invalid_argument("chi_square_gof: empty data");
  ChiSquareResult r;
  double obs = 0.0, exp = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    obs += observed[i];
    exp += probabilities[i] / mass * total;
    if (exp >= min_expected) {
      r.pooled_observed.push_back(obs);
      r.pooled_expected.push_back(exp);
      obs = exp = 0.0;
    }
  }
  if (exp > 0.0 || obs > 0.0) {
    if (r.pooled_expected.empty()) throw std::domain_error("chi_square_gof: pooling left a single bin");
    r.pooled_observed.back() += obs;
    r.pooled_expected.back() += exp;
  }
  if (r.pooled_expected.size() < 2) throw std::domain_error("chi_square_gof: pooling left a single bin");
  for (std::size_t i = 0; i < r.pooled_expected.size(); ++i) {
    const double diff = r.pooled_observed[i] - r.pooled_expected[i];
    r.statistic += diff * diff / r.pooled_expected[i];
  }
  r.degrees_of_freedom = r.pooled_expected.size() - 1;
  r.p_value = r.statistic <= 0.0
                  ? 1.0
                  : boost::math::gamma_q(static_cast<double>(r.degrees_of_freedom) / 2, r.statistic / 2);
  r.rejected = r.p_value < level;
  return r;
}

/// Least-squares fit y = a + b x; returns {a, b}.
inline std::pair<double, double> fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {(sy - b * sx) / n, b};
}

}  // namespace mlcoal
