#include "oobball/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "oobball/errors.hpp"

namespace oobball {

std::size_t ceil_rank(double level, std::size_t k) {
  const double x = level * static_cast<double>(k);
  const auto r = static_cast<std::size_t>(std::ceil(x - 1e-9 * std::max(1.0, x)));
  return std::max<std::size_t>(r, 1);
}

double order_statistic(std::span<const double> values, std::size_t rank) {
  if (rank < 1 || rank > values.size()) throw InvalidArgument("order statistic rank out of range");
  std::vector<double> v(values.begin(), values.end());
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(rank - 1), v.end());
  return v[rank - 1];
}

double mean(std::span<const double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double s = 0.0;
  for (double v : values) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(values.size() - 1));
}

double median(std::span<const double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size();
  return k % 2 == 1 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

std::pair<double, double> wilson_interval(double successes, double trials, double z) {
  if (!(trials > 0.0)) throw InvalidArgument("Wilson interval needs at least one trial");
  const double p = successes / trials;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / trials;
  const double center = (p + z2 / (2.0 * trials)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials)) / denom;
  return {center - half, center + half};
}

double student_t_cdf(double t, double dof) {
  return boost::math::cdf(boost::math::students_t_distribution<double>(dof), t);
}

double paired_t_test_less(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("paired samples differ in length");
  if (a.size() < 2) throw InvalidArgument("paired t-test needs at least two pairs");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const double m = mean(d);
  const double s = sample_sd(d);
  if (s == 0.0) return m < 0.0 ? 0.0 : 1.0;
  const double t = m / (s / std::sqrt(static_cast<double>(d.size())));
  return student_t_cdf(t, static_cast<double>(d.size() - 1));
}

std::vector<double> benjamini_yekutieli(std::span<const double> pvalues) {
  const std::size_t m = pvalues.size();
  std::vector<double> out(m);
  if (m == 0) return out;
  double harmonic = 0.0;
  for (std::size_t i = 1; i <= m; ++i) harmonic += 1.0 / static_cast<double>(i);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pvalues[a] < pvalues[b]; });
  double running = 1.0;
  for (std::size_t r = m; r >= 1; --r) {
    const std::size_t i = order[r - 1];
    running = std::min(running, pvalues[i] * static_cast<double>(m) * harmonic / static_cast<double>(r));
    out[i] = std::min(1.0, running);
  }
  return out;
}

double ks_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("Kolmogorov distance needs two nonempty samples");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0, j = 0;
  double best = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / static_cast<double>(x.size()) -
                                   static_cast<double>(j) / static_cast<double>(y.size())));
  }
  return best;
}

double bootstrap_sd(const PairedIndicators& indicators, std::size_t resamples, Rng& rng) {
  if (resamples < 2) throw InvalidArgument("bootstrap SD needs at least two resamples");
  const std::size_t m = indicators.replicates();
  if (m == 0 || indicators.tests() != m) throw InvalidArgument("indicator matrix must be square and nonempty");
  std::vector<double> estimates(resamples);
  for (auto& e : estimates) {
    std::size_t hits = 0;
    for (std::size_t s = 0; s < m; ++s) {
      const std::size_t j = rng.below(m);
      const std::size_t k = rng.below(m);
      hits += indicators(j, k) ? 1 : 0;
    }
    e = static_cast<double>(hits) / static_cast<double>(m);
  }
  return sample_sd(estimates);
}

}  // namespace oobball
