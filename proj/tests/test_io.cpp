#include <doctest.h>

#include <sstream>
#include <string>

#include "oobball/csv.hpp"
#include "oobball/errors.hpp"
#include "oobball/forest.hpp"
#include "oobball/forest_io.hpp"
#include "oobball/scenario.hpp"

using namespace oobball;

namespace {

std::string error_of(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_csv(in, "data.csv");
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("CSV parsing") {
  std::istringstream in("# comment\nx1:euclidean:1[0],y:sphere:2[0],y:sphere:2[1],y:sphere:2[2]\n\n0.5,0,0,1\n-1,1,0,0\n");
  const auto t = parse_csv(in);
  CHECK(t.rows.size() == 2);
  CHECK(t.line_numbers == std::vector<std::size_t>{4, 5});
  const auto [pred, resp] = infer_spaces(t.header);
  CHECK(pred == ProductSpace({SpaceDescriptor::euclidean(1)}));
  REQUIRE(resp);
  CHECK(*resp == SpaceDescriptor::sphere(2));
  const auto d = dataset_from_csv(t, pred, *resp);
  CHECK(d.size() == 2);

  CHECK(error_of("a,b\n1,x\n").find("line 2") != std::string::npos);
  CHECK(error_of("a,b\n1\n").find("expected 2 fields") != std::string::npos);
  CHECK(error_of("").find("missing header row") != std::string::npos);

  std::istringstream bad("x1:euclidean:1[0],y:sphere:2[0],y:sphere:2[1],y:sphere:2[2]\n0,1,1,0\n");
  const auto tb = parse_csv(bad);
  try {
    dataset_from_csv(tb, pred, *resp);
    FAIL("expected InvalidPoint");
  } catch (const InvalidPoint& e) {
    CHECK(std::string(e.what()).find("row 1 (line 2)") != std::string::npos);
  }
}

TEST_CASE("dataset CSV round trip") {
  ScenarioSpec spec;
  spec.kind = ScenarioKind::SPDWishartInterp;
  spec.n = 10;
  Rng rng(1);
  const Dataset d = generate_scenario(spec, rng);
  std::ostringstream out;
  write_dataset_csv(out, d);
  std::istringstream in(out.str());
  const auto t = parse_csv(in);
  const auto [pred, resp] = infer_spaces(t.header);
  const Dataset back = dataset_from_csv(t, pred, *resp);
  REQUIRE(back.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(back.predictor(i) == d.predictor(i));
    for (std::size_t k = 0; k < 4; ++k) CHECK(back.responses()[i][k] == d.responses()[i][k]);
  }
}

TEST_CASE("forest JSON round trip") {
  for (auto kind : {ScenarioKind::EuclideanLinear, ScenarioKind::SphereGreatCircle}) {
    ScenarioSpec spec;
    spec.kind = kind;
    spec.n = 40;
    Rng rng(2);
    const Dataset d = generate_scenario(spec, rng);
    for (Flavor f : {Flavor::FRF, Flavor::RFWLCFR, Flavor::MRF}) {
      ForestParams params;
      params.trees = 15;
      auto model = fit_forest(d, f, params);
      model.note = "min_split_size=1";
      const std::string text = forest_to_json(model);
      const ForestModel back = forest_from_json(text);
      CHECK(forest_to_json(back) == text);
      CHECK(back.note == model.note);
      const Scenario s(spec);
      for (int k = 0; k < 5; ++k) {
        const auto x = s.draw_predictor(rng);
        CHECK(back.predict(x).coords == model.predict(x).coords);
      }
    }
  }
  CHECK_THROWS(forest_from_json("{\"format\": 1}"));
}

TEST_CASE("metadata line") {
  const std::string line = metadata_line(42, 0xabcdefULL);
  CHECK(line.rfind("# oobball ", 0) == 0);
  CHECK(line.find("seed=42") != std::string::npos);
  CHECK(line.find("config_hash=0000000000abcdef") != std::string::npos);
  CHECK(csv_row({"a", "b"}) == "a,b");
}
