#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "oobball/frechet.hpp"
#include "oobball/metric.hpp"
#include "oobball/sampling.hpp"
#include "oobball/stats.hpp"

using namespace oobball;

namespace {

PointSet euclid_points(std::initializer_list<double> values) {
  PointSet p(SpaceDescriptor::euclidean(1));
  for (double v : values) p.push_back(std::vector<double>{v});
  return p;
}

}  // namespace

TEST_CASE("Frechet mean closed forms") {
  const auto p = euclid_points({0.0, 2.0});
  const auto r = frechet_mean(SampleView{&p});
  CHECK(r.minimizer.coords[0] == doctest::Approx(1.0));
  CHECK(r.method == SolveMethod::ClosedForm);

  const std::vector<double> w{3.0, 1.0};
  const auto rw = frechet_mean(SampleView{&p, {}, w});
  CHECK(rw.minimizer.coords[0] == doctest::Approx(0.5));

  for (const char* text : {"sphere:2", "hyperboloid:2", "spd:2:ai", "spd:2:lc", "spd:2:le", "spheroid:0.5:1"}) {
    const auto space = SpaceDescriptor::parse(text);
    PointSet one(space);
    Rng rng(1);
    std::vector<double> x;
    if (space.kind() == SpaceKind::SPD)
      x = {2.0, 0.3, 0.3, 1.0};
    else if (space.kind() == SpaceKind::Hyperboloid)
      x = {std::cosh(0.5), std::sinh(0.5), 0.0};
    else
      x = sample_uniform_sphere(3, rng);
    one.push_back(x);
    const auto r1 = frechet_mean(SampleView{&one});
    CHECK(distance(space, r1.minimizer.coords, x) < 1e-8);
    CHECK(r1.objective == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("sphere Frechet mean of vMF draws") {
  const std::vector<double> mu{0.0, 0.6, 0.8};
  Rng rng(11);
  PointSet p(SpaceDescriptor::sphere(2));
  for (int k = 0; k < 2000; ++k) p.push_back(sample_vmf(mu, 50.0, rng));
  const auto r = frechet_mean(SampleView{&p});
  CHECK(r.converged);
  CHECK(distance(SpaceDescriptor::sphere(2), r.minimizer.coords, mu) < 0.05);
}

TEST_CASE("Frechet variance") {
  const auto same = euclid_points({3.0, 3.0, 3.0});
  CHECK(frechet_variance(SampleView{&same}, std::vector<double>{3.0}) == 0.0);
  const auto pm = euclid_points({-1.0, 1.0});
  CHECK(frechet_variance(SampleView{&pm}, std::vector<double>{0.0}) == doctest::Approx(1.0));

  // vMF on S^2 with kappa = 200: E theta^2 from the angular density kappa e^{kappa (cos t - 1)} sin t
  // / (1 - e^{-2 kappa}).
  const double kappa = 200.0;
  const double oracle = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double t) {
        return t * t * kappa * std::exp(kappa * (std::cos(t) - 1.0)) * std::sin(t) / (1.0 - std::exp(-2.0 * kappa));
      },
      0.0, std::numbers::pi, 15, 1e-12);
  const std::vector<double> mu{0.0, 0.0, 1.0};
  Rng rng(12);
  PointSet p(SpaceDescriptor::sphere(2));
  std::vector<double> sq;
  for (int k = 0; k < 5000; ++k) {
    const auto y = sample_vmf(mu, kappa, rng);
    p.push_back(y);
    const double d = distance(SpaceDescriptor::sphere(2), y, mu);
    sq.push_back(d * d);
  }
  const double se = sample_sd(sq) / std::sqrt(5000.0);
  CHECK(std::abs(frechet_variance(SampleView{&p}, mu) - oracle) < 3.0 * se);
}

TEST_CASE("Frechet medoid") {
  const auto p = euclid_points({0.0, 1.0, 10.0});
  const auto r = frechet_medoid(SampleView{&p});
  CHECK(r.minimizer.coords[0] == 1.0);
  CHECK(r.method == SolveMethod::Medoid);
  const std::vector<std::uint32_t> only{2};
  CHECK(frechet_medoid(SampleView{&p}, only).minimizer.coords[0] == 10.0);

  // Brute force over 50 random candidates, with and without a distance matrix.
  Rng rng(21);
  PointSet q(SpaceDescriptor::euclidean(2));
  for (int k = 0; k < 50; ++k) q.push_back(std::vector<double>{rng.normal(), rng.normal()});
  std::size_t best = 0;
  double best_obj = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < q.size(); ++c) {
    double obj = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) {
      const double d = distance(q.space(), q[c], q[k]);
      obj += d * d;
    }
    if (obj < best_obj) {
      best_obj = obj;
      best = c;
    }
  }
  const auto m = frechet_medoid(SampleView{&q});
  CHECK(distance(q.space(), m.minimizer.coords, q[best]) == 0.0);
  const DistanceMatrix dm(q);
  const auto m2 = frechet_medoid(SampleView{&q}, {}, &dm);
  CHECK(distance(q.space(), m2.minimizer.coords, q[best]) == 0.0);
  CHECK(m2.objective == doctest::Approx(best_obj / 50.0));
}

TEST_CASE("objective matches its definition") {
  Rng rng(5);
  PointSet p(SpaceDescriptor::sphere(2));
  std::vector<double> w;
  for (int k = 0; k < 30; ++k) {
    p.push_back(sample_uniform_sphere(3, rng));
    w.push_back(rng.uniform());
  }
  const std::vector<double> y{1.0, 0.0, 0.0};
  double num = 0.0, den = 0.0;
  for (int k = 0; k < 30; ++k) {
    const double d = distance(p.space(), p[k], y);
    num += w[k] * d * d;
    den += w[k];
  }
  CHECK(frechet_objective(SampleView{&p, {}, w}, y) == doctest::Approx(num / den).epsilon(1e-12));
}
