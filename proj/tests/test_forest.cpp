#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oobball/balls.hpp"
#include "oobball/errors.hpp"
#include "oobball/forest.hpp"
#include "oobball/forest_io.hpp"
#include "oobball/metric.hpp"
#include "oobball/scenario.hpp"

using namespace oobball;

namespace {

PointSet line(std::initializer_list<double> values) {
  PointSet p(SpaceDescriptor::euclidean(1));
  for (double v : values) p.push_back(std::vector<double>{v});
  return p;
}

Dataset clusters() {
  Dataset d(ProductSpace({SpaceDescriptor::euclidean(1)}), SpaceDescriptor::euclidean(1));
  for (int k = 0; k < 20; ++k) {
    const double x = k / 19.0;
    d.add(std::vector<double>{x}, std::vector<double>{0.0});
    d.add(std::vector<double>{10.0 + x}, std::vector<double>{10.0});
  }
  return d;
}

Dataset linear(std::size_t n, std::uint64_t seed) {
  ScenarioSpec spec;
  spec.n = n;
  Rng rng(seed);
  return generate_scenario(spec, rng);
}

}  // namespace

TEST_CASE("two-means split") {
  const auto p = line({0, 0, 0, 10, 10});
  const std::vector<std::uint32_t> all{0, 1, 2, 3, 4};
  Rng rng(1);
  const auto rule = two_means_split(p, all, 0, false, rng);
  REQUIRE(rule);
  std::vector<double> centers{rule->left[0], rule->right[0]};
  std::sort(centers.begin(), centers.end());
  CHECK(centers[0] == 0.0);
  CHECK(centers[1] == 10.0);
  std::vector<std::uint32_t> l, r;
  partition(p, *rule, all, l, r);
  CHECK(l.size() + r.size() == 5);
  CHECK(std::min(l.size(), r.size()) == 2);

  const auto flat = line({3, 3, 3});
  const std::vector<std::uint32_t> three{0, 1, 2};
  CHECK_FALSE(two_means_split(flat, three, 0, false, rng));
}

TEST_CASE("impurity and gain") {
  const auto y = line({0, 0, 10, 10});
  const std::vector<std::uint32_t> all{0, 1, 2, 3}, l{0, 1}, r{2, 3}, mixed_l{0, 2}, mixed_r{1, 3};
  CHECK(node_variance(y, all, false) == doctest::Approx(25.0));
  CHECK(cart_gain(y, all, l, r, false) == doctest::Approx(25.0));
  CHECK(cart_gain(y, all, mixed_l, mixed_r, false) == doctest::Approx(0.0));
  // Medoid impurity: the best candidate is one of the observed responses.
  CHECK(node_variance(y, all, true) == doctest::Approx(50.0));
  const auto pure = line({4, 4, 4, 4});
  CHECK(cart_gain(pure, all, l, r, false) == 0.0);
}

TEST_CASE("single observation grows a single leaf") {
  Dataset d(ProductSpace({SpaceDescriptor::euclidean(1)}), SpaceDescriptor::euclidean(1));
  d.add(std::vector<double>{1.0}, std::vector<double>{2.0});
  ForestParams params;
  Rng rng(1);
  const Tree t = grow_tree(d, Flavor::RFWLCFR, params, {1}, rng);
  CHECK(t.nodes.size() == 1);
  CHECK(t.nodes[0].is_leaf());
  CHECK(t.nodes[0].members == std::vector<std::uint32_t>{0});
  CHECK_THROWS_AS(fit_forest(d, Flavor::FRF, params), InvalidArgument);
}

TEST_CASE("separable clusters are predicted exactly") {
  const Dataset d = clusters();
  for (Flavor f : {Flavor::FRF, Flavor::RFWLCFR, Flavor::MRF}) {
    ForestParams params;
    params.trees = 50;
    const auto model = fit_forest(d, f, params);
    CHECK(model.predict(std::vector<double>{0.5}).coords[0] == doctest::Approx(0.0));
    CHECK(model.predict(std::vector<double>{10.5}).coords[0] == doctest::Approx(10.0));
  }
}

TEST_CASE("weights") {
  const Dataset d = linear(80, 3);
  ForestParams params;
  params.trees = 30;
  const auto model = fit_forest(d, Flavor::RFWLCFR, params);
  const std::vector<double> x{0.2, -0.4, 1.0};
  const auto w = model.weights(x);
  double total = 0.0;
  for (double v : w) {
    CHECK(v >= 0.0);
    total += v;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  double wm = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) wm += w[i] * d.responses()[i][0];
  CHECK(model.predict(x).coords[0] == doctest::Approx(wm).epsilon(1e-10));

  // With a single tree the leaf mean and the weighted mean coincide.
  params.trees = 1;
  const auto frf = fit_forest(d, Flavor::FRF, params);
  const auto lcfr = fit_forest(d, Flavor::RFWLCFR, params);
  for (int k = 0; k < 10; ++k) {
    const std::vector<double> q{0.1 * k - 0.5, 0.3, -0.2};
    CHECK(frf.predict(q).coords[0] == doctest::Approx(lcfr.predict(q).coords[0]).epsilon(1e-12));
  }

  // MRF predictions are observed responses.
  params.trees = 30;
  const auto mrf = fit_forest(d, Flavor::MRF, params);
  const double pred = mrf.predict(x).coords[0];
  bool found = false;
  for (std::size_t i = 0; i < d.size(); ++i) found = found || d.responses()[i][0] == pred;
  CHECK(found);
}

TEST_CASE("bootstrap leaves about e^-1 of the sample out of bag") {
  const Dataset d = linear(200, 4);
  ForestParams params;
  params.trees = 200;
  const auto model = fit_forest(d, Flavor::RFWLCFR, params);
  double out = 0.0;
  for (const auto& t : model.trees())
    for (std::size_t i = 0; i < d.size(); ++i) out += t.in_bag(i) ? 0.0 : 1.0;
  CHECK(std::abs(out / (200.0 * 200.0) - std::exp(-1.0)) < 0.01);
  for (std::size_t i = 0; i < 10; ++i)
    for (auto b : model.oob_trees(i)) CHECK_FALSE(model.trees()[b].in_bag(i));
}

TEST_CASE("fits are deterministic and thread invariant") {
  const Dataset d = linear(60, 5);
  ForestParams params;
  params.trees = 40;
  params.seed = 9;
  const auto a = fit_forest(d, Flavor::FRF, params);
  params.threads = 2;
  const auto b = fit_forest(d, Flavor::FRF, params);
  CHECK(forest_to_json(a) == forest_to_json(b));
}

TEST_CASE("constant responses give zero errors") {
  Dataset d(ProductSpace({SpaceDescriptor::euclidean(1)}), SpaceDescriptor::sphere(2));
  Rng rng(6);
  for (int k = 0; k < 30; ++k) d.add(std::vector<double>{rng.normal()}, std::vector<double>{0.0, 0.0, 1.0});
  for (Flavor f : {Flavor::FRF, Flavor::RFWLCFR, Flavor::MRF}) {
    ForestParams params;
    params.trees = 20;
    const auto model = fit_forest(d, f, params);
    const auto errors = compute_oob_errors(model);
    for (double e : errors.errors) CHECK(e == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("OOB prediction ignores the held-out response") {
  Dataset d = linear(50, 7);
  Dataset changed(d.predictor_space(), d.response_space());
  for (std::size_t i = 0; i < d.size(); ++i)
    changed.add(d.predictor(i), i == 3 ? std::vector<double>{100.0} : std::vector<double>(d.responses()[i].begin(), d.responses()[i].end()));
  for (Flavor f : {Flavor::FRF, Flavor::RFWLCFR, Flavor::MRF}) {
    ForestParams params;
    params.trees = 60;
    const auto a = fit_forest(d, f, params);
    const auto b = fit_forest(changed, f, params);
    REQUIRE_FALSE(a.oob_trees(3).empty());
    CHECK(a.oob_trees(3) == b.oob_trees(3));
    const auto pa = a.predict_with(d.predictor(3), a.oob_trees(3), 3);
    const auto pb = b.predict_with(d.predictor(3), b.oob_trees(3), 3);
    CHECK(pa.coords[0] == doctest::Approx(pb.coords[0]).epsilon(1e-12));
    CHECK(a.oob_predict(3).coords[0] == doctest::Approx(b.oob_predict(3).coords[0]).epsilon(1e-12));
  }
}

TEST_CASE("OOB error tracks held-out error") {
  const Dataset d = linear(200, 8);
  const Dataset test = linear(2000, 80);
  ForestParams params;
  params.trees = 200;
  const auto model = fit_forest(d, Flavor::RFWLCFR, params);
  const auto oob = compute_oob_errors(model);
  double oob_mse = 0.0, test_mse = 0.0;
  for (double e : oob.errors) oob_mse += e * e / oob.errors.size();
  for (std::size_t i = 0; i < test.size(); ++i) {
    const double e = distance(test.response_space(), model.predict(test.predictor(i)).coords, test.responses()[i]);
    test_mse += e * e / test.size();
  }
  CHECK(oob_mse / test_mse == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("tuning picks the grid minimum") {
  const Dataset d = linear(60, 10);
  ForestParams base;
  base.trees = 30;
  const auto result = tune_hyperparameters(d, Flavor::RFWLCFR, base, {}, 5);
  CHECK(result.grid.size() == 9);
  CHECK(result.cv_errors.size() == 9);
  const auto best = std::min_element(result.cv_errors.begin(), result.cv_errors.end()) - result.cv_errors.begin();
  CHECK(result.params.min_split_size == result.grid[best].first);
  CHECK(result.params.mtry == result.grid[best].second);
  CHECK(result.params.trees == 30);
  ForestParams bad;
  bad.mtry = 4;
  CHECK_THROWS_AS(bad.validate(3), InvalidArgument);
}
