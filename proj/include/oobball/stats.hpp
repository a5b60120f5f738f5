#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "oobball/rng.hpp"

namespace oobball {

// Rank ceil(level * k) with a small guard so that exact products such as 0.9 * 10 are not
// pushed up by rounding. Clamped below at 1.
std::size_t ceil_rank(double level, std::size_t k);

// r-th smallest value (1-based).
double order_statistic(std::span<const double> values, std::size_t rank);

double mean(std::span<const double> values);
// Sample standard deviation (denominator k - 1); 0 for fewer than two values.
double sample_sd(std::span<const double> values);
// Median by averaging the two central order statistics.
double median(std::span<const double> values);

// Wilson score interval for successes out of trials.
std::pair<double, double> wilson_interval(double successes, double trials, double z = 1.959963984540054);

double student_t_cdf(double t, double dof);

// One-sided paired t-test of H1: mean(a - b) < 0. Returns the p-value; 1 when every
// difference is zero, 0 or 1 when the differences are constant and nonzero.
double paired_t_test_less(std::span<const double> a, std::span<const double> b);

// Benjamini-Yekutieli adjusted p-values (valid under arbitrary dependence).
std::vector<double> benjamini_yekutieli(std::span<const double> pvalues);

// Kolmogorov distance between the empirical distributions of two samples.
double ks_distance(std::span<const double> a, std::span<const double> b);

// Indicator layout for coverage bootstraps: covered(j, k) says whether test pair k falls in
// the ball of training replicate j. The estimate uses the diagonal pairs (j, j).
class PairedIndicators {
 public:
  PairedIndicators(std::size_t replicates, std::size_t tests) : m_(replicates), t_(tests), v_(replicates * tests, 0) {}
  std::size_t replicates() const { return m_; }
  std::size_t tests() const { return t_; }
  void set(std::size_t j, std::size_t k, bool covered) { v_[j * t_ + k] = covered ? 1 : 0; }
  bool operator()(std::size_t j, std::size_t k) const { return v_[j * t_ + k] != 0; }

 private:
  std::size_t m_, t_;
  std::vector<unsigned char> v_;
};

// SD over K bootstrap estimates, each pairing M replicates drawn with replacement with M
// test pairs drawn independently with replacement; no refitting involved.
double bootstrap_sd(const PairedIndicators& indicators, std::size_t resamples, Rng& rng);

}  // namespace oobball
