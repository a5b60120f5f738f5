#include "oobball/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "oobball/errors.hpp"
#include "oobball/rng.hpp"

namespace oobball {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct KeyError {
  std::string message;
};

double to_real(const std::string& v) {
  double x = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size()) throw KeyError{"'" + v + "' is not a number"};
  return x;
}

std::uint64_t to_unsigned(const std::string& v) {
  std::uint64_t x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size())
    throw KeyError{"'" + v + "' is not a nonnegative integer"};
  return x;
}

int to_int(const std::string& v) {
  int x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size()) throw KeyError{"'" + v + "' is not an integer"};
  return x;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw KeyError{"'" + v + "' is not a boolean"};
}

template <class T, class F>
std::vector<T> to_list(const std::string& v, F convert) {
  std::vector<T> out;
  for (const auto& item : split_list(v)) out.push_back(static_cast<T>(convert(item)));
  if (out.empty()) throw KeyError{"empty list"};
  return out;
}

ExperimentKind parse_kind(const std::string& v) {
  for (auto k : {ExperimentKind::TypeI, ExperimentKind::TypeII, ExperimentKind::TypeIII, ExperimentKind::TypeIV,
                 ExperimentKind::Mse, ExperimentKind::RadiusVolume, ExperimentKind::SpheroidStudy})
    if (experiment_name(k) == v) return k;
  throw KeyError{"unknown experiment type '" + v + "' (type1, type2, type3, type4, mse, radius_volume, spheroid)"};
}

SpdMetric parse_metric(const std::string& v) {
  if (v == "ai") return SpdMetric::AI;
  if (v == "lc") return SpdMetric::LC;
  if (v == "le") return SpdMetric::LE;
  throw KeyError{"unknown SPD metric '" + v + "' (ai, lc, le)"};
}

std::string metric_name(SpdMetric m) { return m == SpdMetric::AI ? "ai" : m == SpdMetric::LC ? "lc" : "le"; }

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"experiment.type", [](auto& c, const auto& v) { c.kind = parse_kind(v); }},
      {"experiment.name", [](auto& c, const auto& v) { c.name = v; }},
      {"experiment.alphas", [](auto& c, const auto& v) { c.alphas = to_list<double>(v, to_real); }},
      {"experiment.n", [](auto& c, const auto& v) { c.ns = to_list<std::size_t>(v, to_unsigned); }},
      {"experiment.replicates", [](auto& c, const auto& v) { c.replicates = to_unsigned(v); }},
      {"experiment.mc", [](auto& c, const auto& v) { c.mc = to_unsigned(v); }},
      {"experiment.bootstrap", [](auto& c, const auto& v) { c.bootstrap = to_unsigned(v); }},
      {"experiment.x0", [](auto& c, const auto& v) { c.x0 = to_list<double>(v, to_real); }},
      {"experiment.x0_quantile", [](auto& c, const auto& v) { c.x0_quantile = to_real(v); }},
      {"experiment.methods",
       [](auto& c, const auto& v) {
         c.methods.clear();
         for (const auto& m : split_list(v)) {
           try {
             c.methods.push_back(parse_ball_method(m));
           } catch (const ParseError& e) {
             throw KeyError{e.what()};
           }
         }
         if (c.methods.empty()) throw KeyError{"empty list"};
       }},
      {"experiment.test_draws", [](auto& c, const auto& v) { c.test_draws = to_unsigned(v); }},
      {"experiment.spheroid_a", [](auto& c, const auto& v) { c.spheroid_a = to_list<double>(v, to_real); }},
      {"experiment.q_values", [](auto& c, const auto& v) { c.qs = to_list<std::size_t>(v, to_unsigned); }},
      {"experiment.area_directions", [](auto& c, const auto& v) { c.area_directions = to_unsigned(v); }},
      {"scenario.kind",
       [](auto& c, const auto& v) {
         try {
           c.scenario.kind = parse_scenario_kind(v);
         } catch (const ParseError& e) {
           throw KeyError{e.what()};
         }
       }},
      {"scenario.sigma", [](auto& c, const auto& v) { c.scenario.sigma = to_real(v); }},
      {"scenario.q", [](auto& c, const auto& v) { c.scenario.q = to_unsigned(v); }},
      {"scenario.rho", [](auto& c, const auto& v) { c.scenario.rho = to_real(v); }},
      {"scenario.kappa", [](auto& c, const auto& v) { c.scenario.kappa = to_real(v); }},
      {"scenario.dof", [](auto& c, const auto& v) { c.scenario.dof = to_real(v); }},
      {"scenario.metric", [](auto& c, const auto& v) { c.scenario.metric = parse_metric(v); }},
      {"scenario.grid", [](auto& c, const auto& v) { c.scenario.grid = to_unsigned(v); }},
      {"scenario.east_sd", [](auto& c, const auto& v) { c.scenario.east_sd = to_real(v); }},
      {"scenario.north_sd", [](auto& c, const auto& v) { c.scenario.north_sd = to_real(v); }},
      {"forest.flavor",
       [](auto& c, const auto& v) {
         try {
           c.flavor = parse_flavor(v);
         } catch (const ParseError& e) {
           throw KeyError{e.what()};
         }
       }},
      {"forest.trees", [](auto& c, const auto& v) { c.forest.trees = to_unsigned(v); }},
      {"forest.mtry", [](auto& c, const auto& v) { c.forest.mtry = to_unsigned(v); }},
      {"forest.min_split_size", [](auto& c, const auto& v) { c.forest.min_split_size = to_unsigned(v); }},
      {"forest.tune", [](auto& c, const auto& v) { c.tune = to_bool(v); }},
      {"forest.tune_trees", [](auto& c, const auto& v) { c.tune_trees = to_unsigned(v); }},
      {"forest.folds", [](auto& c, const auto& v) { c.folds = to_unsigned(v); }},
      {"run.seed", [](auto& c, const auto& v) { c.seed = to_unsigned(v); }},
      {"run.threads", [](auto& c, const auto& v) { c.threads = to_int(v); }},
      {"run.timings", [](auto& c, const auto& v) { c.timings = to_bool(v); }},
      {"run.output_dir", [](auto& c, const auto& v) { c.output_dir = v; }},
      {"run.paper_scale", [](auto& c, const auto& v) { c.paper_scale = to_bool(v); }},
  };
  return table;
}

void apply(ExperimentConfig& c, const std::string& key, const std::string& value, const std::string& where) {
  const auto& table = setters();
  auto it = table.find(key);
  if (it == table.end()) throw ParseError(where + "unknown config key '" + key + "'");
  try {
    it->second(c, value);
  } catch (const KeyError& e) {
    throw ParseError(where + "config key '" + key + "': " + e.message);
  }
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    if constexpr (std::is_floating_point_v<T>)
      s += format_real(v[i]);
    else
      s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace

std::string experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::TypeI:
      return "type1";
    case ExperimentKind::TypeII:
      return "type2";
    case ExperimentKind::TypeIII:
      return "type3";
    case ExperimentKind::TypeIV:
      return "type4";
    case ExperimentKind::Mse:
      return "mse";
    case ExperimentKind::RadiusVolume:
      return "radius_volume";
    case ExperimentKind::SpheroidStudy:
      return "spheroid";
  }
  return {};
}

void ExperimentConfig::apply_paper_scale() {
  paper_scale = true;
  mc = 1000;
  replicates = 1000;
  bootstrap = 500;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& key, const std::string& msg) {
    throw InvalidArgument("config key '" + key + "': " + msg);
  };
  if (alphas.empty()) fail("experiment.alphas", "empty list");
  for (double a : alphas)
    if (!(a > 0.0 && a < 1.0)) fail("experiment.alphas", "every alpha must lie in (0, 1)");
  if (ns.empty()) fail("experiment.n", "empty list");
  for (auto n : ns)
    if (n < 4) fail("experiment.n", "sample sizes must be at least 4");
  if (replicates < 1) fail("experiment.replicates", "must be at least 1");
  if (mc < 1) fail("experiment.mc", "must be at least 1");
  if (bootstrap < 2 && (kind == ExperimentKind::TypeI || kind == ExperimentKind::TypeIII))
    fail("experiment.bootstrap", "must be at least 2");
  if (forest.trees < 1) fail("forest.trees", "must be at least 1");
  if (forest.min_split_size < 1) fail("forest.min_split_size", "must be at least 1");
  if (folds < 2) fail("forest.folds", "must be at least 2");
  if (methods.empty()) fail("experiment.methods", "empty list");
  for (auto m : methods)
    if (m == BallMethod::Population) fail("experiment.methods", "only oob and sc balls are estimated from data");
  if (test_draws < 1) fail("experiment.test_draws", "must be at least 1");
  if (x0_quantile && !(*x0_quantile > 0.0 && *x0_quantile < 1.0))
    fail("experiment.x0_quantile", "must lie in (0, 1)");
  try {
    scenario.validate();
  } catch (const InvalidArgument& e) {
    fail("scenario", e.what());
  }
  const Scenario sc(scenario);
  const std::size_t p = sc.predictor_space().arity();
  if (forest.mtry > p) fail("forest.mtry", "must not exceed the number of predictors (" + std::to_string(p) + ")");
  if (kind == ExperimentKind::TypeIII || kind == ExperimentKind::TypeIV) {
    if (x0.empty() && !x0_quantile) fail("experiment.x0", "Types III and IV need x0 or x0_quantile");
    if (!x0.empty()) {
      if (x0.size() != sc.predictor_space().coordinate_count())
        fail("experiment.x0", "needs " + std::to_string(sc.predictor_space().coordinate_count()) + " coordinates");
      try {
        for (std::size_t j = 0; j < p; ++j)
          validate_point(sc.predictor_space()[j], std::span<const double>(x0).subspan(
                                                      sc.predictor_space().offset(j),
                                                      sc.predictor_space()[j].coordinate_count()));
      } catch (const InvalidPoint& e) {
        fail("experiment.x0", e.what());
      }
    }
  }
  if (kind == ExperimentKind::SpheroidStudy) {
    if (scenario.kind != ScenarioKind::SphereAnisotropic)
      fail("scenario.kind", "the spheroid study needs the sphere_anisotropic scenario");
    for (double a : spheroid_a)
      if (!(a > 0.0)) fail("experiment.spheroid_a", "semi-axes must be positive");
    if (area_directions < 4) fail("experiment.area_directions", "must be at least 4");
  }
  if (kind == ExperimentKind::RadiusVolume) {
    if (scenario.kind != ScenarioKind::EuclideanMultivariate)
      fail("scenario.kind", "the radius/volume comparison needs the euclidean_multivariate scenario");
    for (auto q : qs)
      if (q < 1) fail("experiment.q_values", "must be positive");
  }
}

std::vector<double> ExperimentConfig::resolved_x0() const {
  if (!x0.empty()) return x0;
  if (x0_quantile) return Scenario(scenario).predictor_quantile(*x0_quantile);
  return {};
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream s;
  s << "type=" << experiment_name(kind) << ";name=" << name << ";scenario=" << scenario_name(scenario.kind)
    << ";sigma=" << format_real(scenario.sigma) << ";q=" << scenario.q << ";rho=" << format_real(scenario.rho)
    << ";kappa=" << format_real(scenario.kappa) << ";dof=" << format_real(scenario.dof)
    << ";metric=" << metric_name(scenario.metric) << ";grid=" << scenario.grid
    << ";east_sd=" << format_real(scenario.east_sd) << ";north_sd=" << format_real(scenario.north_sd)
    << ";flavor=" << flavor_name(flavor) << ";alphas=" << join(alphas) << ";n=" << join(ns)
    << ";replicates=" << replicates << ";mc=" << mc << ";bootstrap=" << bootstrap << ";trees=" << forest.trees
    << ";mtry=" << forest.mtry << ";min_split_size=" << forest.min_split_size << ";tune=" << tune
    << ";tune_trees=" << tune_trees << ";folds=" << folds << ";x0=" << join(resolved_x0())
    << ";methods=";
  for (std::size_t i = 0; i < methods.size(); ++i) s << (i ? "," : "") << ball_method_name(methods[i]);
  s << ";test_draws=" << test_draws << ";spheroid_a=" << join(spheroid_a) << ";q_values=" << join(qs)
    << ";area_directions=" << area_directions << ";seed=" << seed << ";timings=" << timings;
  return s.str();
}

std::uint64_t ExperimentConfig::hash() const { return hash_string(canonical().c_str()); }

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + " line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(where + "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(where + "expected key = value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.find('.') == std::string::npos) {
      if (section.empty()) throw ParseError(where + "key '" + key + "' outside a section");
      key = section + "." + key;
    }
    apply(c, key, value, where);
  }
  if (c.paper_scale) c.apply_paper_scale();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

void apply_config_override(ExperimentConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ParseError("override '" + assignment + "' is not key=value");
  apply(config, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)), "");
  if (config.paper_scale) config.apply_paper_scale();
}

}  // namespace oobball
