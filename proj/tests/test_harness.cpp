#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "oobball/config.hpp"
#include "oobball/errors.hpp"
#include "oobball/harness.hpp"
#include "oobball/stats.hpp"

using namespace oobball;

namespace {

ExperimentConfig small(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.ns = {30};
  c.alphas = {0.1};
  c.mc = 6;
  c.replicates = 3;
  c.bootstrap = 20;
  c.test_draws = 20;
  c.tune = false;
  c.forest.trees = 20;
  c.seed = 3;
  return c;
}

std::string coverage_text(const ExperimentConfig& c, const CoverageReport& r) {
  std::ostringstream out;
  write_coverage_csv(out, c, r);
  write_coverage_replicates_csv(out, c, r);
  return out.str();
}

}  // namespace

TEST_CASE("bootstrap SD") {
  Rng rng(1);
  PairedIndicators all(50, 50);
  for (std::size_t j = 0; j < 50; ++j)
    for (std::size_t k = 0; k < 50; ++k) all.set(j, k, true);
  CHECK(bootstrap_sd(all, 100, rng) == 0.0);

  // Independent Bernoulli(0.9) indicators: SD near sqrt(0.9 * 0.1 / M).
  PairedIndicators bern(1000, 1000);
  for (std::size_t j = 0; j < 1000; ++j)
    for (std::size_t k = 0; k < 1000; ++k) bern.set(j, k, rng.uniform() < 0.9);
  const double sd = bootstrap_sd(bern, 500, rng);
  CHECK(sd == doctest::Approx(std::sqrt(0.09 / 1000.0)).epsilon(0.3));
}

TEST_CASE("statistics helpers") {
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(median(v) == 2.5);
  CHECK(sample_sd(v) == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(student_t_cdf(0.0, 5.0) == doctest::Approx(0.5));
  const std::vector<double> a{1, 2, 3}, b{2, 3, 5};
  CHECK(paired_t_test_less(a, b) < 0.05);
  CHECK(paired_t_test_less(a, a) == 1.0);
  const std::vector<double> p{0.01, 0.04};
  const auto adj = benjamini_yekutieli(p);
  // c(2) = 1.5: adjusted values min(1, 1.5 * 2 * 0.01 / 1, 1.5 * 2 * 0.04 / 2).
  CHECK(adj[0] == doctest::Approx(0.03));
  CHECK(adj[1] == doctest::Approx(0.06));
}

TEST_CASE("config parsing") {
  const auto c = parse_config(
      "[experiment]\ntype = type3\nn = 50, 100\nalphas = 0.1,0.05\nx0_quantile = 0.25\n"
      "[scenario]\nkind = sphere_great_circle\nkappa = 20\n[forest]\nflavor = frf\ntrees = 10\n"
      "run.seed = 4\n");
  CHECK(c.kind == ExperimentKind::TypeIII);
  CHECK(c.ns == std::vector<std::size_t>{50, 100});
  CHECK(c.scenario.kappa == 20.0);
  CHECK(c.flavor == Flavor::FRF);
  CHECK(c.seed == 4);
  CHECK(c.resolved_x0().size() == 2);  // a point on S^1

  auto bad = [](const std::string& text) {
    try {
      parse_config(text, "t.cfg").validate();
    } catch (const std::exception& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(bad("[forest]\ntrees = many\n").find("forest.trees") != std::string::npos);
  CHECK(bad("[forest]\ntrees = many\n").find("line 2") != std::string::npos);
  CHECK(bad("[experiment]\nbogus = 1\n").find("experiment.bogus") != std::string::npos);
  CHECK(bad("[experiment]\nalphas = 1.5\n").find("experiment.alphas") != std::string::npos);
  CHECK(bad("[experiment]\nmethods = population\n").find("experiment.methods") != std::string::npos);

  ExperimentConfig d;
  apply_config_override(d, "forest.trees=7");
  CHECK(d.forest.trees == 7);
  CHECK_THROWS_AS(apply_config_override(d, "forest.trees"), ParseError);

  // Threads and output location never enter the hash.
  ExperimentConfig e = d;
  e.threads = 2;
  e.output_dir = "/tmp/elsewhere";
  CHECK(e.hash() == d.hash());
  e.seed = 99;
  CHECK(e.hash() != d.hash());

  ExperimentConfig p;
  p.apply_paper_scale();
  CHECK(p.mc == 1000);
  CHECK(p.replicates == 1000);
  CHECK(p.bootstrap == 500);
}

TEST_CASE("coverage output is thread invariant") {
  for (auto kind : {ExperimentKind::TypeI, ExperimentKind::TypeII}) {
    auto c = small(kind);
    c.methods = {BallMethod::OOB, BallMethod::SplitConformal};
    c.threads = 1;
    const auto r1 = kind == ExperimentKind::TypeI ? estimate_type_I(c) : estimate_type_II(c);
    c.threads = 2;
    const auto r2 = kind == ExperimentKind::TypeI ? estimate_type_I(c) : estimate_type_II(c);
    CHECK(coverage_text(c, r1) == coverage_text(c, r2));
    REQUIRE(r1.cells.size() == 2);
    for (const auto& cell : r1.cells) {
      CHECK(cell.coverage >= 0.0);
      CHECK(cell.coverage <= 1.0);
      CHECK(cell.sd >= 0.0);
    }
  }
}

TEST_CASE("a single replicate still yields every column") {
  auto c = small(ExperimentKind::TypeII);
  c.replicates = 1;
  const auto r = estimate_type_II(c);
  REQUIRE(r.cells.size() == 1);
  CHECK(r.cells[0].coverages.size() == 1);
  CHECK(r.cells[0].sd == 0.0);
  std::ostringstream out;
  write_coverage_quantiles_csv(out, c, r);
  CHECK(out.str().find("median") != std::string::npos);
}

TEST_CASE("type III and IV share one center") {
  auto c = small(ExperimentKind::TypeIV);
  c.x0_quantile = 0.25;
  const auto r = estimate_type_IV(c);
  CHECK(r.x0 == c.resolved_x0());
  c.kind = ExperimentKind::TypeIII;
  CHECK(estimate_type_III(c).x0 == c.resolved_x0());
}

TEST_CASE("radius and volume ratios") {
  auto c = small(ExperimentKind::RadiusVolume);
  c.scenario.kind = ScenarioKind::EuclideanMultivariate;
  c.qs = {1, 3};
  const auto cells = compare_radius_volume(c);
  REQUIRE(cells.size() == 2);
  for (const auto& cell : cells)
    for (std::size_t j = 0; j < cell.radius_rel.size(); ++j) {
      CHECK(cell.radius_rel[j] == doctest::Approx((cell.sc_radii[j] - cell.oob_radii[j]) / cell.oob_radii[j]));
      CHECK(cell.volume_rel[j] ==
            doctest::Approx(std::pow(1.0 + cell.radius_rel[j], static_cast<double>(cell.q)) - 1.0));
    }
}

TEST_CASE("spheroid study baseline row") {
  auto c = small(ExperimentKind::SpheroidStudy);
  c.scenario.kind = ScenarioKind::SphereAnisotropic;
  c.spheroid_a = {0.5, 1.0};
  c.test_draws = 10;
  c.area_directions = 16;
  const auto cells = spheroid_anisotropy_study(c);
  REQUIRE(cells.size() == 1);
  REQUIRE(cells[0].rows.size() == 2);
  const auto& base = cells[0].rows[0];
  CHECK(base.a == 1.0);
  CHECK(base.delta_mse == 0.0);
  CHECK(base.delta_area == 0.0);
  CHECK(cells[0].rows[1].a == 0.5);
}
