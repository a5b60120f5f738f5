#include <doctest.h>

#include <boost/math/special_functions/digamma.hpp>

#include <algorithm>
#include <cmath>

#include "oobball/frechet.hpp"
#include "oobball/metric.hpp"
#include "oobball/sampling.hpp"
#include "oobball/scenario.hpp"
#include "oobball/stats.hpp"
#include "oobball/validation.hpp"

using namespace oobball;

TEST_CASE("rng streams are reproducible and distinct") {
  Rng a(5), b(5);
  CHECK(a.uniform() == b.uniform());
  Rng c1 = Rng(5).child({1, 2}), c2 = Rng(5).child({1, 2}), c3 = Rng(5).child({2, 1});
  const double x = c1.uniform();
  CHECK(x == c2.uniform());
  CHECK(x != c3.uniform());
}

TEST_CASE("vMF draws") {
  Rng rng(1);
  const std::vector<double> mu{0.0, 0.0, 1.0};
  std::vector<double> sum(3, 0.0);
  for (int k = 0; k < 100000; ++k) {
    const auto y = sample_vmf(mu, 0.0, rng);
    for (int i = 0; i < 3; ++i) sum[i] += y[i] / 100000.0;
  }
  CHECK(std::sqrt(sum[0] * sum[0] + sum[1] * sum[1] + sum[2] * sum[2]) < 0.02);

  std::fill(sum.begin(), sum.end(), 0.0);
  for (int k = 0; k < 100000; ++k) {
    const auto y = sample_vmf(mu, 200.0, rng);
    for (int i = 0; i < 3; ++i) sum[i] += y[i];
  }
  const double norm = std::sqrt(sum[0] * sum[0] + sum[1] * sum[1] + sum[2] * sum[2]);
  for (auto& s : sum) s /= norm;
  CHECK(distance(SpaceDescriptor::sphere(2), sum, mu) < 0.01);

  // Mean resultant length on S^2: coth(kappa) - 1/kappa.
  std::vector<double> dots;
  for (int k = 0; k < 50000; ++k) dots.push_back(sample_vmf(mu, 2.0, rng)[2]);
  const double oracle = 1.0 / std::tanh(2.0) - 0.5;
  CHECK(oracle == doctest::Approx(0.53731).epsilon(1e-4));
  CHECK(std::abs(mean(dots) - oracle) < 3.0 * sample_sd(dots) / std::sqrt(50000.0));
}

TEST_CASE("HvMF draws") {
  Rng rng(2);
  const std::vector<double> vertex{1.0, 0.0, 0.0};
  // Radial law on H^2: P(U <= u) = 1 - exp(-kappa (cosh u - 1)).
  for (double kappa : {1.0, 10.0}) {
    std::vector<double> u;
    for (int k = 0; k < 5000; ++k) {
      const auto y = sample_hvmf(vertex, kappa, rng);
      validate_point(SpaceDescriptor::hyperboloid(2), y);
      u.push_back(std::acosh(std::max(1.0, y[0])));
    }
    std::sort(u.begin(), u.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double f = 1.0 - std::exp(-kappa * (std::cosh(u[i]) - 1.0));
      ks = std::max({ks, std::abs(f - static_cast<double>(i) / 5000.0), std::abs(f - static_cast<double>(i + 1) / 5000.0)});
    }
    // Kolmogorov critical value for p = 0.01.
    CHECK(ks * std::sqrt(5000.0) < 1.628);
  }

  const auto report = validate_hvmf(3, 20000);
  for (const auto& c : report.checks) {
    INFO(c.name << " value " << c.value);
    CHECK(c.passed);
  }
}

TEST_CASE("Wishart moments and closed-form means") {
  Rng rng(4);
  spd::Matrix sigma(2, 2);
  sigma << 1.0, 0.3, 0.3, 0.5;
  const int n = 100000;
  std::vector<std::vector<double>> entries(4);
  for (int k = 0; k < n; ++k) {
    const auto s = spd::flatten(sample_wishart(5.0, sigma, rng));
    for (int i = 0; i < 4; ++i) entries[i].push_back(s[i]);
  }
  for (int i = 0; i < 4; ++i)
    CHECK(std::abs(mean(entries[i]) - 5.0 * sigma(i / 2, i % 2)) < 3.0 * sample_sd(entries[i]) / std::sqrt(n));

  // c_{d,1} = 2 exp(psi(d/2)); at d = 2 this is 2 e^{-gamma}.
  CHECK(wishart_ai_constant(2.0, 1) == doctest::Approx(2.0 * std::exp(boost::math::digamma(1.0))));
  CHECK(wishart_ai_constant(2.0, 1) == doctest::Approx(1.12292).epsilon(1e-5));

  // Sample Karcher mean against c_{d,q} sigma, and the sample log-Cholesky mean against T T^T.
  const SpaceDescriptor ai = SpaceDescriptor::spd(2, SpdMetric::AI);
  PointSet draws(ai);
  std::vector<std::vector<double>> emb(3);
  for (int k = 0; k < 20000; ++k) {
    const auto s = sample_wishart(8.0, sigma, rng);
    draws.push_back(spd::flatten(s));
    const auto e = spd::log_cholesky_embed(s);
    for (int i = 0; i < 3; ++i) emb[i].push_back(e[i]);
  }
  const auto karcher = frechet_mean(SampleView{&draws});
  CHECK(distance(ai, karcher.minimizer.coords, spd::flatten(wishart_ai_mean(8.0, sigma))) < 0.02);
  const auto target = spd::log_cholesky_embed(wishart_lc_mean(8.0, sigma));
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(mean(emb[i]) - target[i]) < 3.0 * sample_sd(emb[i]) / std::sqrt(20000.0));
}

TEST_CASE("scenario regression functions") {
  ScenarioSpec lin;
  CHECK(Scenario(lin).regression(std::vector<double>{0, 0, 0})[0] == 0.0);
  ScenarioSpec sph;
  sph.kind = ScenarioKind::SphereGreatCircle;
  const auto m = Scenario(sph).regression(std::vector<double>{1.0, 0.0});
  CHECK(m[0] == 1.0);
  CHECK(m[1] == 0.0);
  const auto m0 = spd_interpolation(0.0);
  CHECK(m0[0] == doctest::Approx(1.0));
  CHECK(m0[1] == doctest::Approx(-0.6));
  CHECK(m0[3] == doctest::Approx(0.5));

  Rng rng(6);
  for (auto kind : {ScenarioKind::EuclideanLinear, ScenarioKind::EuclideanMultivariate, ScenarioKind::SphereGreatCircle,
                    ScenarioKind::HyperboloidMeridian, ScenarioKind::SPDWishartInterp, ScenarioKind::QuantileGridModel,
                    ScenarioKind::SphereAnisotropic}) {
    ScenarioSpec spec;
    spec.kind = kind;
    spec.n = 30;
    const Dataset data = generate_scenario(spec, rng);
    CHECK(data.size() == 30);
    CHECK_NOTHROW(data.validate());
  }
}
