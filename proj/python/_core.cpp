#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "oobball/balls.hpp"
#include "oobball/errors.hpp"
#include "oobball/forest.hpp"
#include "oobball/forest_io.hpp"
#include "oobball/metric.hpp"
#include "oobball/scenario.hpp"
#include "oobball/validation.hpp"

namespace py = pybind11;
using namespace oobball;

namespace {

using Rows = std::vector<std::vector<double>>;

Dataset make_dataset(const Rows& x, const Rows& y, const std::string& predictors, const std::string& response) {
  if (x.size() != y.size()) throw InvalidArgument("x and y must have the same number of rows");
  Dataset d(ProductSpace::parse(predictors), SpaceDescriptor::parse(response));
  d.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d.add(x[i], y[i]);
  d.validate();
  return d;
}

// Fitted forest plus its OOB errors, computed once.
class Forest {
 public:
  explicit Forest(ForestModel model) : model_(std::make_shared<ForestModel>(std::move(model))) {}

  std::vector<double> predict(const std::vector<double>& x) const { return model_->predict(x).coords; }

  std::vector<double> oob_errors() const { return errors().errors; }

  std::pair<std::vector<double>, double> ball(const std::vector<double>& x, double alpha) const {
    const auto b = oob_ball(*model_, errors(), x, alpha);
    return {b.center.coords, b.radius};
  }

  std::string to_json() const { return forest_to_json(*model_); }
  std::string flavor() const { return flavor_name(model_->flavor()); }
  std::size_t trees() const { return model_->trees().size(); }
  std::string response_space() const { return model_->response_space().to_string(); }
  std::string predictor_space() const { return model_->predictor_space().to_string(); }

 private:
  const OobErrorSet& errors() const {
    if (!errors_) errors_ = std::make_shared<OobErrorSet>(compute_oob_errors(*model_));
    return *errors_;
  }
  std::shared_ptr<ForestModel> model_;
  mutable std::shared_ptr<OobErrorSet> errors_;
};

Forest fit(const Rows& x, const Rows& y, const std::string& predictors, const std::string& response,
           const std::string& flavor, std::size_t trees, std::size_t mtry, std::size_t min_split_size,
           std::uint64_t seed) {
  ForestParams params;
  params.trees = trees;
  params.mtry = mtry;
  params.min_split_size = min_split_size;
  params.seed = seed;
  return Forest(fit_forest(make_dataset(x, y, predictors, response), parse_flavor(flavor), params));
}

py::dict simulate(const std::string& scenario, std::size_t n, std::uint64_t seed, double kappa, double sigma) {
  ScenarioSpec spec;
  spec.kind = parse_scenario_kind(scenario);
  spec.n = n;
  spec.kappa = kappa;
  spec.sigma = sigma;
  Rng rng(seed);
  const Dataset d = generate_scenario(spec, rng);
  Rows x, y;
  for (std::size_t i = 0; i < d.size(); ++i) {
    x.push_back(d.predictor(i));
    const auto r = d.responses()[i];
    y.emplace_back(r.begin(), r.end());
  }
  py::dict out;
  out["x"] = x;
  out["y"] = y;
  out["predictors"] = d.predictor_space().to_string();
  out["response"] = d.response_space().to_string();
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Random forests with out-of-bag prediction balls for metric-space responses";
  m.attr("__version__") = OOBBALL_VERSION;

  py::register_exception<InvalidPoint>(m, "InvalidPoint", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

  m.def(
      "distance",
      [](const std::string& space, const std::vector<double>& a, const std::vector<double>& b) {
        return distance(SpaceDescriptor::parse(space), a, b);
      },
      py::arg("space"), py::arg("a"), py::arg("b"), "Geodesic distance between two points of a space");

  py::class_<Forest>(m, "Forest")
      .def("predict", &Forest::predict, py::arg("x"))
      .def("oob_errors", &Forest::oob_errors)
      .def("ball", &Forest::ball, py::arg("x"), py::arg("alpha") = 0.1,
           "OOB prediction ball at x as (center, radius)")
      .def("to_json", &Forest::to_json)
      .def_property_readonly("flavor", &Forest::flavor)
      .def_property_readonly("trees", &Forest::trees)
      .def_property_readonly("predictor_space", &Forest::predictor_space)
      .def_property_readonly("response_space", &Forest::response_space);

  m.def("fit", &fit, py::arg("x"), py::arg("y"), py::arg("predictors"), py::arg("response"),
        py::arg("flavor") = "rfwlcfr", py::arg("trees") = 200, py::arg("mtry") = 0, py::arg("min_split_size") = 1,
        py::arg("seed") = 1, py::call_guard<py::gil_scoped_release>());
  m.def("load_forest", [](const std::string& text) { return Forest(forest_from_json(text)); }, py::arg("text"));
  m.def("simulate", &simulate, py::arg("scenario"), py::arg("n") = 100, py::arg("seed") = 1,
        py::arg("kappa") = 50.0, py::arg("sigma") = 0.8660254037844386);
  m.def(
      "validate_geometry",
      [](std::size_t triples, std::uint64_t seed) {
        GeometryConfig c;
        c.triples = triples;
        c.seed = seed;
        const auto r = validate_geometry(c);
        std::vector<std::pair<std::string, bool>> checks;
        for (const auto& k : r.checks) checks.emplace_back(k.name, k.passed);
        return checks;
      },
      py::arg("triples") = 1000, py::arg("seed") = 1);
}
