#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "oobball/balls.hpp"
#include "oobball/metric.hpp"
#include "oobball/scenario.hpp"
#include "oobball/stats.hpp"
#include "oobball/validation.hpp"

using namespace oobball;

namespace {

const double kPi = std::numbers::pi;

Dataset linear(std::size_t n, std::uint64_t seed) {
  ScenarioSpec spec;
  spec.n = n;
  Rng rng(seed);
  return generate_scenario(spec, rng);
}

PredictionBall euclid_ball(std::size_t q, double r) {
  return PredictionBall{MetricPoint{SpaceDescriptor::euclidean(q), std::vector<double>(q, 0.0)}, r, BallMethod::OOB, 0.1};
}

}  // namespace

TEST_CASE("order-statistic quantiles") {
  const std::vector<double> ten{3, 1, 4, 10, 5, 9, 2, 6, 8, 7};
  CHECK(empirical_quantile(ten, 0.1) == 9.0);
  CHECK(empirical_quantile(ten, 0.05) == 10.0);
  CHECK(ceil_rank(0.9, 10) == 9);
  CHECK(ceil_rank(0.0, 10) == 1);

  Rng rng(1);
  std::vector<double> u(10000);
  for (auto& v : u) v = rng.uniform();
  CHECK(std::abs(empirical_quantile(u, 0.05) - 0.95) < 0.01);

  // Nine calibration residuals: rank ceil(0.9 * 10) = 9 and ceil(0.95 * 10) = 10 > 9.
  const std::vector<double> nine{1, 2, 3, 4, 5, 6, 7, 8, 9};
  CHECK(conformal_quantile(nine, 0.1) == 9.0);
  CHECK(conformal_quantile(nine, 0.2) == 8.0);
  CHECK(std::isinf(conformal_quantile(nine, 0.05)));
}

TEST_CASE("population balls") {
  Rng rng(2);
  ScenarioSpec lin;
  lin.sigma = 1.0;
  const auto b1 = population_ball(Scenario(lin), std::vector<double>{0.1, 0.2, 0.3}, 0.1, rng);
  CHECK(b1.radius == doctest::Approx(1.6448536).epsilon(1e-6));
  CHECK(b1.center.coords[0] == doctest::Approx(0.2));

  ScenarioSpec mv;
  mv.kind = ScenarioKind::EuclideanMultivariate;
  mv.q = 2;
  mv.rho = 0.0;
  mv.sigma = 1.0;
  const Scenario s2(mv);
  const auto b2 = population_ball(s2, s2.predictor_quantile(0.5), 0.05, rng);
  CHECK(b2.radius == doctest::Approx(2.4477468).epsilon(1e-6));

  // Concentration shrinks the vMF ball.
  double last = std::numeric_limits<double>::infinity();
  for (double kappa : {10.0, 50.0, 200.0}) {
    ScenarioSpec sph;
    sph.kind = ScenarioKind::SphereGreatCircle;
    sph.kappa = kappa;
    const auto b = population_ball(Scenario(sph), std::vector<double>{1.0, 0.0}, 0.1, rng, 20000);
    CHECK(b.radius < last);
    last = b.radius;
  }
}

TEST_CASE("ball volumes") {
  Rng rng(3);
  CHECK(ball_volume(euclid_ball(1, 0.7), rng).value == doctest::Approx(1.4));
  CHECK(ball_volume(euclid_ball(2, 0.7), rng).value == doctest::Approx(kPi * 0.49));
  CHECK(ball_volume(euclid_ball(3, 0.7), rng).value == doctest::Approx(4.0 / 3.0 * kPi * 0.343));
  const PredictionBall cap{MetricPoint{SpaceDescriptor::sphere(2), {0.0, 0.0, 1.0}}, 0.5, BallMethod::OOB, 0.1};
  CHECK(ball_volume(cap, rng).value == doctest::Approx(2.0 * kPi * (1.0 - std::cos(0.5))));
}

TEST_CASE("membership is strict and infinite radii cover everything") {
  const auto b = euclid_ball(1, 1.0);
  CHECK_FALSE(b.contains(std::vector<double>{1.0}));
  CHECK(b.contains(std::vector<double>{0.5}));
  const auto inf = euclid_ball(1, std::numeric_limits<double>::infinity());
  CHECK(inf.contains(std::vector<double>{1e300}));
}

TEST_CASE("boundary samples lie on the sphere of the ball") {
  Rng rng(4);
  for (const char* text : {"euclidean:3", "sphere:2", "hyperboloid:2", "spd:2:ai", "spd:2:lc", "spd:2:le"}) {
    const auto space = SpaceDescriptor::parse(text);
    const PredictionBall ball{MetricPoint{space, random_point(space, rng)}, 0.4, BallMethod::OOB, 0.1};
    for (const auto& y : boundary_sample(ball, 20, rng))
      CHECK(distance(space, ball.center.coords, y) == doctest::Approx(0.4).epsilon(1e-9));
  }
}

TEST_CASE("split halves") {
  Rng rng(5);
  const auto [train, calib] = split_halves(7, rng);
  CHECK(train.size() == 3);
  CHECK(calib.size() == 4);
  std::set<std::size_t> all(train.begin(), train.end());
  all.insert(calib.begin(), calib.end());
  CHECK(all.size() == 7);
  CHECK(*all.rbegin() == 6);
}

TEST_CASE("OOB and split-conformal balls") {
  const Dataset d = linear(100, 6);
  ForestParams params;
  params.trees = 100;
  const auto model = fit_forest(d, Flavor::RFWLCFR, params);
  const auto errors = compute_oob_errors(model);
  CHECK(errors.errors.size() + errors.dropped.size() == 100);
  const std::vector<double> x{0.0, 0.5, -0.5};
  const auto ball = oob_ball(model, errors, x, 0.1);
  CHECK(ball.radius == empirical_quantile(errors.errors, 0.1));
  CHECK(ball.center.coords == model.predict(x).coords);
  CHECK(oob_ball(model, x, 0.1).radius == ball.radius);
  CHECK(oob_ball(model, errors, x, 0.05).radius >= ball.radius);

  Rng rng(7);
  const auto sc = split_conformal_fit(d, Flavor::RFWLCFR, params, rng);
  CHECK(sc.model.size() == 50);
  CHECK(sc.residuals.size() == 50);
  CHECK(split_conformal_ball(sc, x, 0.1).radius == conformal_quantile(sc.residuals, 0.1));

  // Two calibration points cannot support a 90% conformal ball.
  const Dataset tiny = linear(4, 8);
  const auto sc_tiny = split_conformal_fit(tiny, Flavor::RFWLCFR, params, rng);
  const auto open = split_conformal_ball(sc_tiny, x, 0.1);
  CHECK(std::isinf(open.radius));
  CHECK(open.contains(std::vector<double>{1e6}));

  const auto doubly = doubly_oob_ball(model, 0, 0.1);
  CHECK(std::isfinite(doubly.radius));
  CHECK(doubly.center.coords == model.oob_predict(0).coords);
}
