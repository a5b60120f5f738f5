#include "commands.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oobball/balls.hpp"
#include "oobball/config.hpp"
#include "oobball/csv.hpp"
#include "oobball/errors.hpp"
#include "oobball/forest.hpp"
#include "oobball/forest_io.hpp"
#include "oobball/harness.hpp"
#include "oobball/metric.hpp"
#include "oobball/parallel.hpp"
#include "oobball/scenario.hpp"
#include "oobball/stats.hpp"
#include "oobball/validation.hpp"

namespace oobball::cli {

namespace {

class FitFailure : public Error {
 public:
  using Error::Error;
};

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;

  std::uint64_t seed_or(std::uint64_t fallback) const { return seed.value_or(fallback); }
  int thread_count() const { return resolve_threads(threads.value_or(0)); }
};

// Standard output unless a path is given.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw InvalidArgument("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::string join_reals(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_real(v[i]);
  return s;
}

std::vector<std::string> formatted(std::span<const double> v) {
  std::vector<std::string> out;
  for (double x : v) out.push_back(format_real(x));
  return out;
}

Dataset load_dataset(const std::string& path, const std::string& predictors, const std::string& response) {
  const CsvTable table = read_csv(path);
  if (!predictors.empty() && !response.empty())
    return dataset_from_csv(table, ProductSpace::parse(predictors), SpaceDescriptor::parse(response));
  auto [named_predictors, named_response] = infer_spaces(table.header);
  if (!named_response && response.empty()) throw ParseError(path + ": no response columns (y:<space>[k])");
  const ProductSpace ps = predictors.empty() ? named_predictors : ProductSpace::parse(predictors);
  const SpaceDescriptor rs = response.empty() ? *named_response : SpaceDescriptor::parse(response);
  return dataset_from_csv(table, ps, rs);
}

// An empty file (or one with comments only) is an empty query set.
std::vector<std::vector<double>> load_queries(const std::string& path, const ProductSpace& predictors) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  bool any = false;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    const auto p = line.find_first_not_of(" \t\r");
    if (p != std::string::npos && line[p] != '#') any = true;
  }
  if (!any) return {};
  std::istringstream csv(text);
  const CsvTable table = parse_csv(csv, path);
  std::optional<ProductSpace> named;
  try {
    named = infer_spaces(table.header).first;
  } catch (const ParseError&) {
    // Unnamed columns: only the column count is checked.
  }
  if (named && !(*named == predictors))
    throw DescriptorMismatch("query predictors " + named->to_string() + " do not match the model predictors " +
                             predictors.to_string());
  return queries_from_csv(table, predictors);
}

// ---- fit ----

struct FitOptions {
  std::string data, out, predictors, response, flavor = "rfwlcfr";
  std::size_t trees = 200, mtry = 0, min_split = 1, folds = 5, tune_trees = 0;
  bool tune = false;
};

int cmd_fit(const FitOptions& o, const Globals& g) {
  const Dataset data = load_dataset(o.data, o.predictors, o.response);
  const Flavor flavor = parse_flavor(o.flavor);
  ForestParams params;
  params.trees = o.trees;
  params.mtry = o.mtry;
  params.min_split_size = o.min_split;
  params.seed = g.seed_or(1);
  params.threads = g.thread_count();
  try {
    std::string note;
    if (o.tune) {
      std::cerr << "tuning by " << o.folds << "-fold cross-validation\n";
      const TuningResult tr = tune_hyperparameters(data, flavor, params, TuningGrid{}, o.folds, o.tune_trees);
      params = tr.params;
      params.threads = g.thread_count();
      std::ostringstream s;
      s << "tuned by " << o.folds << "-fold CV: min_split_size=" << params.min_split_size
        << " mtry=" << params.resolved_mtry(data.predictor_space().arity()) << "; grid";
      for (std::size_t i = 0; i < tr.grid.size(); ++i)
        s << " (" << tr.grid[i].first << "," << tr.grid[i].second << ")=" << format_real(tr.cv_errors[i]);
      note = s.str();
    }
    ForestModel model = fit_forest(data, flavor, params);
    model.note = note;
    const OobErrorSet errors = compute_oob_errors(model, params.threads);
    save_forest(model, o.out);
    double sq = 0.0;
    for (double e : errors.errors) sq += e * e;
    std::cout << "model " << o.out << ": flavor=" << flavor_name(flavor) << " trees=" << params.trees
              << " mtry=" << params.resolved_mtry(data.predictor_space().arity())
              << " min_split_size=" << params.min_split_size << '\n'
              << "oob_mse=" << format_real(sq / static_cast<double>(errors.errors.size()))
              << " retained=" << errors.errors.size() << " dropped=" << errors.dropped.size() << '\n';
    if (!note.empty()) std::cout << note << '\n';
  } catch (const InvalidPoint&) {
    throw;
  } catch (const Error& e) {
    throw FitFailure(std::string("fit failed: ") + e.what());
  }
  return kOk;
}

// ---- predict / ball / oob-errors ----

struct ModelOptions {
  std::string model, queries, out, method = "oob";
  std::vector<double> alphas{0.1};
};

std::uint64_t command_hash(const std::string& name, const std::string& settings, const ForestModel& model) {
  return hash_string((name + ";" + settings + ";model=" + forest_to_json(model)).c_str());
}

int cmd_predict(const ModelOptions& o, const Globals& g) {
  const ForestModel model = load_forest(o.model);
  const auto queries = load_queries(o.queries, model.predictor_space());
  std::vector<MetricPoint> out(queries.size());
  parallel_for(queries.size(), g.thread_count(), [&](std::size_t i) { out[i] = model.predict(queries[i]); });
  Sink sink(o.out);
  auto& s = sink.stream();
  s << metadata_line(g.seed_or(model.params().seed), command_hash("predict", "", model)) << '\n';
  std::vector<std::string> header{"query"};
  for (auto& c : response_columns(model.response_space())) header.push_back(c);
  s << csv_row(header) << '\n';
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::vector<std::string> row{std::to_string(i)};
    for (auto& c : formatted(out[i].coords)) row.push_back(c);
    s << csv_row(row) << '\n';
  }
  return kOk;
}

int cmd_ball(const ModelOptions& o, const Globals& g) {
  const BallMethod method = parse_ball_method(o.method);
  if (method == BallMethod::Population) throw InvalidArgument("--method must be oob or sc");
  for (double a : o.alphas)
    if (!(a > 0.0 && a < 1.0)) throw InvalidArgument("--alpha values must lie in (0, 1)");
  const ForestModel model = load_forest(o.model);
  const auto queries = load_queries(o.queries, model.predictor_space());
  const std::uint64_t seed = g.seed_or(model.params().seed);

  std::optional<SplitConformalModel> sc;
  OobErrorSet errors;
  if (method == BallMethod::SplitConformal) {
    Rng rng(seed);
    ForestParams params = model.params();
    params.threads = g.thread_count();
    sc.emplace(split_conformal_fit(model.training(), model.flavor(), params, rng));
  } else {
    errors = compute_oob_errors(model, g.thread_count());
  }
  std::vector<double> radii;
  for (double a : o.alphas)
    radii.push_back(sc ? conformal_quantile(sc->residuals, a) : empirical_quantile(errors, a));
  std::vector<MetricPoint> centers(queries.size());
  parallel_for(queries.size(), g.thread_count(), [&](std::size_t i) {
    centers[i] = sc ? sc->model.predict(queries[i]) : model.predict(queries[i]);
  });

  Sink sink(o.out);
  auto& s = sink.stream();
  const std::string settings = "method=" + ball_method_name(method) + ";alphas=" + join_reals(o.alphas) +
                               (sc ? ";seed=" + std::to_string(seed) : "");
  s << metadata_line(seed, command_hash("ball", settings, model)) << '\n';
  std::vector<std::string> header{"query", "alpha", "method", "radius"};
  for (auto& c : response_columns(model.response_space())) header.push_back("center_" + c);
  s << csv_row(header) << '\n';
  for (std::size_t i = 0; i < queries.size(); ++i)
    for (std::size_t a = 0; a < o.alphas.size(); ++a) {
      std::vector<std::string> row{std::to_string(i), format_real(o.alphas[a]), ball_method_name(method),
                                   format_real(radii[a])};
      for (auto& c : formatted(centers[i].coords)) row.push_back(c);
      s << csv_row(row) << '\n';
    }
  return kOk;
}

int cmd_oob_errors(const ModelOptions& o, const Globals& g) {
  const ForestModel model = load_forest(o.model);
  const OobErrorSet errors = compute_oob_errors(model, g.thread_count());
  if (!errors.dropped.empty())
    std::cerr << errors.dropped.size() << " observations are in-bag for every tree and were dropped\n";
  Sink sink(o.out);
  auto& s = sink.stream();
  s << metadata_line(g.seed_or(model.params().seed), command_hash("oob-errors", "", model)) << '\n';
  s << "index,error\n";
  for (std::size_t k = 0; k < errors.errors.size(); ++k)
    s << errors.indices[k] << ',' << format_real(errors.errors[k]) << '\n';
  return kOk;
}

// ---- simulate ----

struct SimulateOptions {
  std::string scenario = "euclidean_linear", metric = "ai", out;
  ScenarioSpec spec;
};

int cmd_simulate(SimulateOptions o, const Globals& g) {
  o.spec.kind = parse_scenario_kind(o.scenario);
  if (o.metric == "ai")
    o.spec.metric = SpdMetric::AI;
  else if (o.metric == "lc")
    o.spec.metric = SpdMetric::LC;
  else if (o.metric == "le")
    o.spec.metric = SpdMetric::LE;
  else
    throw ParseError("--metric must be ai, lc or le");
  o.spec.validate();
  const std::uint64_t seed = g.seed_or(1);
  Rng rng(seed);
  const Dataset data = generate_scenario(o.spec, rng);
  const auto& sp = o.spec;
  const std::string canonical = "simulate;scenario=" + scenario_name(sp.kind) + ";n=" + std::to_string(sp.n) +
                                ";sigma=" + format_real(sp.sigma) + ";q=" + std::to_string(sp.q) +
                                ";rho=" + format_real(sp.rho) + ";kappa=" + format_real(sp.kappa) +
                                ";dof=" + format_real(sp.dof) + ";metric=" + o.metric +
                                ";grid=" + std::to_string(sp.grid) + ";east_sd=" + format_real(sp.east_sd) +
                                ";north_sd=" + format_real(sp.north_sd) + ";a=" + format_real(sp.spheroid_a) +
                                ";c=" + format_real(sp.spheroid_c);
  Sink sink(o.out);
  sink.stream() << metadata_line(seed, hash_string(canonical.c_str())) << '\n';
  write_dataset_csv(sink.stream(), data);
  return kOk;
}

// ---- coverage ----

struct CoverageOptions {
  std::string config, output_dir;
  std::vector<std::string> overrides;
  bool paper_scale = false, timings = false;
};

int cmd_coverage(const CoverageOptions& o, const Globals& g) {
  ExperimentConfig config = load_config(o.config);
  for (const auto& kv : o.overrides) apply_config_override(config, kv);
  if (o.paper_scale) config.apply_paper_scale();
  if (o.timings) config.timings = true;
  if (g.seed) config.seed = *g.seed;
  if (g.threads) config.threads = *g.threads;
  if (!o.output_dir.empty()) config.output_dir = o.output_dir;
  config.validate();
  std::cerr << "experiment " << config.name << " (" << experiment_name(config.kind) << "), config hash "
            << hex64(config.hash()) << ", " << resolve_threads(config.threads) << " threads\n";
  const auto paths = run_experiment(config, [](const std::string& m) { std::cerr << m << '\n'; });
  for (const auto& p : paths) std::cout << p << '\n';
  return kOk;
}

// ---- validate ----

struct ValidateOptions {
  std::string target, space = "spd:2:ai";
  double dof = 15.0;
  std::size_t draws = 25000, grid = 600, triples = 10000, hvmf_draws = 100000;
  bool corrupt = false;
};

int cmd_validate(const ValidateOptions& o, const Globals& g) {
  ValidationReport report;
  if (o.target == "means") {
    const SpaceDescriptor space = SpaceDescriptor::parse(o.space);
    if (space.kind() != SpaceKind::SPD) throw InvalidArgument("--space must be an SPD space (spd:q:metric)");
    MeansConfig mc;
    mc.q = space.size();
    mc.dof = o.dof;
    mc.draws = o.draws;
    mc.grid = o.grid;
    mc.seed = g.seed_or(1);
    mc.threads = g.thread_count();
    mc.corrupt = o.corrupt;
    const MeansResult r = validate_frechet_means(mc);
    std::cout << "Wishart_" << mc.q << "(" << format_real(mc.dof) << ", I), " << mc.draws << " draws, " << mc.grid
              << " grid points on [-1, 2]\n"
              << "AI argmin index " << r.ai_argmin << " (t=" << format_real(r.t[r.ai_argmin]) << ")\n"
              << "LC argmin index " << r.lc_argmin << " (t=" << format_real(r.t[r.lc_argmin]) << ")\n";
    report = r.report;
  } else if (o.target == "geometry") {
    GeometryConfig gc;
    gc.triples = o.triples;
    gc.seed = g.seed_or(1);
    gc.threads = g.thread_count();
    report = validate_geometry(gc);
  } else if (o.target == "hvmf") {
    report = validate_hvmf(g.seed_or(1), o.hvmf_draws);
  } else {
    throw ParseError("validate target must be means, geometry or hvmf");
  }
  print_report(std::cout, report);
  return report.passed() ? kOk : kValidationFailed;
}

// ---- boundary-sample ----

struct BoundaryOptions {
  std::string space, out;
  std::vector<double> center;
  double radius = 0.0;
  std::size_t count = 100;
};

int cmd_boundary(const BoundaryOptions& o, const Globals& g) {
  const SpaceDescriptor space = SpaceDescriptor::parse(o.space);
  if (o.center.size() != space.coordinate_count())
    throw DescriptorMismatch("--center has " + std::to_string(o.center.size()) + " coordinates, " +
                             space.to_string() + " needs " + std::to_string(space.coordinate_count()));
  validate_point(space, o.center);
  const std::uint64_t seed = g.seed_or(1);
  Rng rng(seed);
  const PredictionBall ball{MetricPoint{space, o.center}, o.radius, BallMethod::OOB, 0.1};
  const auto points = boundary_sample(ball, o.count, rng);
  const std::string canonical = "boundary-sample;space=" + space.to_string() + ";center=" + join_reals(o.center) +
                                ";radius=" + format_real(o.radius) + ";count=" + std::to_string(o.count);
  Sink sink(o.out);
  auto& s = sink.stream();
  s << metadata_line(seed, hash_string(canonical.c_str())) << '\n';
  s << csv_row(response_columns(space)) << '\n';
  for (const auto& p : points) s << csv_row(formatted(p)) << '\n';
  return kOk;
}

void add_model_options(CLI::App* sub, ModelOptions& o, bool queries) {
  sub->add_option("--model", o.model, "Model file written by fit")->required()->check(CLI::ExistingFile);
  if (queries) sub->add_option("--queries", o.queries, "Query CSV (predictor columns)")->required()->check(CLI::ExistingFile);
  sub->add_option("--out,-o", o.out, "Output CSV (default: standard output)");
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Random forests with out-of-bag prediction balls for metric-space responses"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(OOBBALL_VERSION));
  Globals g;
  app.add_option("--seed", g.seed, "Random seed (default 1)")->envname("OOBBALL_SEED");
  app.add_option("--threads", g.threads, "Worker threads (default: all cores); never changes results")
      ->envname("OOBBALL_THREADS");

  std::function<int()> action;

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a forest on a CSV dataset");
  fit_cmd->add_option("--data", fit.data, "Training CSV")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--out,-o", fit.out, "Model file to write")->required();
  fit_cmd->add_option("--predictors", fit.predictors, "Predictor space, e.g. product[euclidean:1,sphere:2]");
  fit_cmd->add_option("--response", fit.response, "Response space, e.g. sphere:2");
  fit_cmd->add_option("--flavor", fit.flavor, "frf, rfwlcfr or mrf")->capture_default_str();
  fit_cmd->add_option("--trees", fit.trees, "Number of trees")->capture_default_str();
  fit_cmd->add_option("--mtry", fit.mtry, "Candidate predictors per split (0: all)")->capture_default_str();
  fit_cmd->add_option("--min-split", fit.min_split, "Minimum child size")->capture_default_str();
  fit_cmd->add_flag("--tune", fit.tune, "Choose min split size and mtry by cross-validation");
  fit_cmd->add_option("--folds", fit.folds, "Cross-validation folds")->capture_default_str();
  fit_cmd->add_option("--tune-trees", fit.tune_trees, "Trees per forest inside the search (0: --trees)");
  fit_cmd->callback([&] { action = [&] { return cmd_fit(fit, g); }; });

  ModelOptions predict;
  auto* predict_cmd = app.add_subcommand("predict", "Forest predictions at query points");
  add_model_options(predict_cmd, predict, true);
  predict_cmd->callback([&] { action = [&] { return cmd_predict(predict, g); }; });

  ModelOptions ball;
  auto* ball_cmd = app.add_subcommand("ball", "Prediction balls at query points");
  add_model_options(ball_cmd, ball, true);
  ball_cmd->add_option("--alpha", ball.alphas, "Miscoverage levels")->delimiter(',')->capture_default_str();
  ball_cmd->add_option("--method", ball.method, "oob or sc")->capture_default_str();
  ball_cmd->callback([&] { action = [&] { return cmd_ball(ball, g); }; });

  ModelOptions oob;
  auto* oob_cmd = app.add_subcommand("oob-errors", "Out-of-bag radial errors of the training data");
  add_model_options(oob_cmd, oob, false);
  oob_cmd->callback([&] { action = [&] { return cmd_oob_errors(oob, g); }; });

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Draw a synthetic dataset");
  sim_cmd->add_option("--scenario", sim.scenario,
                      "euclidean_linear, euclidean_multivariate, sphere_great_circle, hyperboloid_meridian, "
                      "spd_wishart, quantile_grid or sphere_anisotropic")
      ->capture_default_str();
  sim_cmd->add_option("--n", sim.spec.n, "Sample size")->capture_default_str();
  sim_cmd->add_option("--sigma", sim.spec.sigma)->capture_default_str();
  sim_cmd->add_option("--q", sim.spec.q, "Response dimension (euclidean_multivariate)")->capture_default_str();
  sim_cmd->add_option("--rho", sim.spec.rho)->capture_default_str();
  sim_cmd->add_option("--kappa", sim.spec.kappa)->capture_default_str();
  sim_cmd->add_option("--dof", sim.spec.dof)->capture_default_str();
  sim_cmd->add_option("--metric", sim.metric, "SPD metric: ai, lc or le")->capture_default_str();
  sim_cmd->add_option("--grid", sim.spec.grid)->capture_default_str();
  sim_cmd->add_option("--east-sd", sim.spec.east_sd)->capture_default_str();
  sim_cmd->add_option("--north-sd", sim.spec.north_sd)->capture_default_str();
  sim_cmd->add_option("--spheroid-a", sim.spec.spheroid_a)->capture_default_str();
  sim_cmd->add_option("--spheroid-c", sim.spec.spheroid_c)->capture_default_str();
  sim_cmd->add_option("--out,-o", sim.out, "Output CSV (default: standard output)");
  sim_cmd->callback([&] { action = [&] { return cmd_simulate(sim, g); }; });

  CoverageOptions cov;
  auto* cov_cmd = app.add_subcommand("coverage", "Run a Monte Carlo experiment from a config file");
  cov_cmd->add_option("--config", cov.config, "Experiment config file")->required()->check(CLI::ExistingFile);
  cov_cmd->add_option("--set", cov.overrides, "Override a config key, e.g. --set experiment.mc=50");
  cov_cmd->add_flag("--paper-scale", cov.paper_scale, "M = N = 1000, K = 500");
  cov_cmd->add_flag("--timings", cov.timings, "Record wall-clock seconds in the CSV");
  cov_cmd->add_option("--output-dir", cov.output_dir, "Directory for the result CSVs");
  cov_cmd->callback([&] { action = [&] { return cmd_coverage(cov, g); }; });

  ValidateOptions val;
  auto add_validate = [&](const std::string& name, const std::string& fixed_target) {
    auto* cmd = app.add_subcommand(name, "Run a validation suite (means, geometry or hvmf)");
    if (fixed_target.empty()) cmd->add_option("target", val.target, "means, geometry or hvmf")->required();
    cmd->add_option("--space", val.space, "SPD space for means")->capture_default_str();
    cmd->add_option("--d", val.dof, "Wishart degrees of freedom")->capture_default_str();
    cmd->add_option("--draws", val.draws, "Wishart draws")->capture_default_str();
    cmd->add_option("--grid", val.grid, "Points on the t grid")->capture_default_str();
    cmd->add_option("--triples", val.triples, "Random triples per space")->capture_default_str();
    cmd->add_option("--hvmf-draws", val.hvmf_draws, "HvMF draws")->capture_default_str();
    cmd->add_flag("--corrupt-mean", val.corrupt, "Test hook: perturb the closed-form means");
    cmd->callback([&, fixed_target] {
      if (!fixed_target.empty()) val.target = fixed_target;
      action = [&] { return cmd_validate(val, g); };
    });
  };
  add_validate("validate", "");
  add_validate("validate-means", "means");
  add_validate("validate-geometry", "geometry");

  BoundaryOptions bnd;
  auto* bnd_cmd = app.add_subcommand("boundary-sample", "Points on the boundary of a ball");
  bnd_cmd->add_option("--space", bnd.space, "Response space")->required();
  bnd_cmd->add_option("--center", bnd.center, "Center coordinates")->required()->delimiter(',');
  bnd_cmd->add_option("--radius", bnd.radius, "Ball radius")->required();
  bnd_cmd->add_option("--count", bnd.count, "Number of points")->capture_default_str();
  bnd_cmd->add_option("--out,-o", bnd.out, "Output CSV (default: standard output)");
  bnd_cmd->callback([&] { action = [&] { return cmd_boundary(bnd, g); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kParseError;
  }
  try {
    return action();
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParseError;
  } catch (const InvalidPoint& e) {
    std::cerr << "invalid point: " << e.what() << '\n';
    return kInvalidPoint;
  } catch (const DescriptorMismatch& e) {
    std::cerr << "descriptor mismatch: " << e.what() << '\n';
    return kDescriptorMismatch;
  } catch (const FitFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFitFailure;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParseError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFitFailure;
  }
}

}  // namespace oobball::cli
