#include "oobball/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "oobball/csv.hpp"
#include "oobball/errors.hpp"
#include "oobball/metric.hpp"
#include "oobball/parallel.hpp"
#include "oobball/stats.hpp"

namespace oobball {

namespace {

// Stream keys. Every random quantity is drawn from root.child({key, n, replicate, ...}).
constexpr std::uint64_t kData = 0xDA7A;
constexpr std::uint64_t kTest = 0x7E57;
constexpr std::uint64_t kForest = 0xF0E5;
constexpr std::uint64_t kSplit = 0x5C5C;
constexpr std::uint64_t kScForest = 0x5CF0;
constexpr std::uint64_t kBoot = 0xB007;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void say(const ProgressFn& progress, const std::string& message) {
  if (progress) progress(message);
}

std::uint64_t draw_seed(const Rng& root, std::initializer_list<std::uint64_t> keys) {
  Rng r = root.child(keys);
  return r.engine()();
}

ForestModel fit_tuned(const Dataset& data, const ExperimentConfig& c, Flavor flavor, std::uint64_t seed) {
  ForestParams params = c.forest;
  params.seed = seed;
  params.threads = 1;
  if (c.tune) {
    params = tune_hyperparameters(data, flavor, params, TuningGrid{}, c.folds, c.tune_trees).params;
    params.threads = 1;
  }
  return fit_forest(data, flavor, params);
}

// Forests of one replicate dataset and their radius sources.
struct Fitted {
  std::optional<ForestModel> oob;
  OobErrorSet errors;
  std::optional<SplitConformalModel> sc;

  MetricPoint center(BallMethod m, std::span<const double> x) const {
    return m == BallMethod::OOB ? oob->predict(x) : sc->model.predict(x);
  }
  double radius(BallMethod m, double alpha) const {
    return m == BallMethod::OOB ? empirical_quantile(errors, alpha) : conformal_quantile(sc->residuals, alpha);
  }
};

Fitted fit_replicate(const Dataset& data, const ExperimentConfig& c, Flavor flavor,
                     const std::vector<BallMethod>& methods, const Rng& root, std::size_t n, std::size_t j) {
  Fitted f;
  const bool want_oob = std::find(methods.begin(), methods.end(), BallMethod::OOB) != methods.end();
  const bool want_sc = std::find(methods.begin(), methods.end(), BallMethod::SplitConformal) != methods.end();
  if (want_oob) {
    f.oob.emplace(fit_tuned(data, c, flavor, draw_seed(root, {kForest, n, j})));
    f.errors = compute_oob_errors(*f.oob, 1);
  }
  if (want_sc) {
    Rng split_rng = root.child({kSplit, n, j});
    const auto [train, calibration] = split_halves(data.size(), split_rng);
    const Dataset train_data = data.subset(train);
    ForestModel model = fit_tuned(train_data, c, flavor, draw_seed(root, {kScForest, n, j}));
    auto residuals = calibration_residuals(model, data.subset(calibration));
    f.sc.emplace(SplitConformalModel{std::move(model), std::move(residuals)});
  }
  return f;
}

Dataset replicate_data(const Scenario& scenario, const Rng& root, std::size_t n, std::size_t j) {
  Rng r = root.child({kData, n, j});
  return scenario.generate(n, r);
}

struct CellBuffers {
  std::vector<double> coverages, radii, mses;
  explicit CellBuffers(std::size_t reps) : coverages(reps, 0.0), radii(reps, 0.0), mses(reps, 0.0) {}
};

// Types I and III share the paired layout; Types II and IV (and the MSE comparison) the
// per-replicate layout.
CoverageReport run_paired(const ExperimentConfig& c, ExperimentKind kind, bool fixed_x, const ProgressFn& progress) {
  c.validate();
  const Scenario scenario(c.scenario);
  const Rng root(c.seed);
  const int threads = resolve_threads(c.threads);
  const std::size_t m = c.mc;
  const std::size_t na = c.alphas.size(), nm = c.methods.size();

  CoverageReport report;
  report.kind = kind;
  report.scenario = scenario_name(c.scenario.kind);
  if (fixed_x) report.x0 = c.resolved_x0();

  for (std::size_t n : c.ns) {
    const auto t0 = Clock::now();
    say(progress, experiment_name(kind) + ": n=" + std::to_string(n) + ", " + std::to_string(m) + " forests");
    std::vector<std::vector<double>> tx(m), ty(m);
    for (std::size_t k = 0; k < m; ++k) {
      Rng r = root.child({kTest, n, k});
      tx[k] = fixed_x ? report.x0 : scenario.draw_predictor(r);
      ty[k] = scenario.draw_response(tx[k], r);
    }
    std::vector<PairedIndicators> indicators(na * nm, PairedIndicators(m, m));
    std::vector<CellBuffers> buffers(na * nm, CellBuffers(m));

    parallel_for(m, threads, [&](std::size_t j) {
      const Dataset data = replicate_data(scenario, root, n, j);
      const Fitted f = fit_replicate(data, c, c.flavor, c.methods, root, n, j);
      std::vector<double> d(m);
      for (std::size_t q = 0; q < nm; ++q) {
        const BallMethod method = c.methods[q];
        if (fixed_x) {
          const MetricPoint center = f.center(method, report.x0);
          for (std::size_t k = 0; k < m; ++k) d[k] = distance(center.space, center.coords, ty[k]);
        } else {
          for (std::size_t k = 0; k < m; ++k) {
            const MetricPoint center = f.center(method, tx[k]);
            d[k] = distance(center.space, center.coords, ty[k]);
          }
        }
        for (std::size_t a = 0; a < na; ++a) {
          const double r = f.radius(method, c.alphas[a]);
          auto& ind = indicators[a * nm + q];
          for (std::size_t k = 0; k < m; ++k) ind.set(j, k, d[k] < r);
          auto& b = buffers[a * nm + q];
          b.coverages[j] = d[j] < r ? 1.0 : 0.0;
          b.radii[j] = r;
          b.mses[j] = d[j] * d[j];
        }
      }
    });

    const double secs = seconds_since(t0);
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t q = 0; q < nm; ++q) {
        auto& b = buffers[a * nm + q];
        CoverageCell cell;
        cell.n = n;
        cell.alpha = c.alphas[a];
        cell.method = c.methods[q];
        cell.coverage = mean(b.coverages);
        Rng boot = root.child({kBoot, n, a, q});
        cell.sd = bootstrap_sd(indicators[a * nm + q], c.bootstrap, boot);
        cell.coverages = std::move(b.coverages);
        cell.radii = std::move(b.radii);
        cell.mses = std::move(b.mses);
        cell.seconds = secs;
        report.cells.push_back(std::move(cell));
      }
  }
  return report;
}

CoverageReport run_per_replicate(const ExperimentConfig& c, ExperimentKind kind, bool fixed_x,
                                 const std::vector<BallMethod>& methods, std::size_t tests,
                                 const ProgressFn& progress) {
  c.validate();
  const Scenario scenario(c.scenario);
  const Rng root(c.seed);
  const int threads = resolve_threads(c.threads);
  const std::size_t reps = c.replicates;
  const std::size_t na = c.alphas.size(), nm = methods.size();

  CoverageReport report;
  report.kind = kind;
  report.scenario = scenario_name(c.scenario.kind);
  if (fixed_x) report.x0 = c.resolved_x0();

  for (std::size_t n : c.ns) {
    const auto t0 = Clock::now();
    say(progress, experiment_name(kind) + ": n=" + std::to_string(n) + ", " + std::to_string(reps) + " datasets");
    std::vector<CellBuffers> buffers(na * nm, CellBuffers(reps));

    parallel_for(reps, threads, [&](std::size_t j) {
      const Dataset data = replicate_data(scenario, root, n, j);
      const Fitted f = fit_replicate(data, c, c.flavor, methods, root, n, j);
      std::vector<std::vector<double>> tx(tests), ty(tests);
      Rng r = root.child({kTest, n, j});
      for (std::size_t k = 0; k < tests; ++k) {
        tx[k] = fixed_x ? report.x0 : scenario.draw_predictor(r);
        ty[k] = scenario.draw_response(tx[k], r);
      }
      std::vector<double> d(tests);
      for (std::size_t q = 0; q < nm; ++q) {
        if (fixed_x) {
          const MetricPoint center = f.center(methods[q], report.x0);
          for (std::size_t k = 0; k < tests; ++k) d[k] = distance(center.space, center.coords, ty[k]);
        } else {
          for (std::size_t k = 0; k < tests; ++k) {
            const MetricPoint center = f.center(methods[q], tx[k]);
            d[k] = distance(center.space, center.coords, ty[k]);
          }
        }
        double sq = 0.0;
        for (double v : d) sq += v * v;
        for (std::size_t a = 0; a < na; ++a) {
          const double rad = f.radius(methods[q], c.alphas[a]);
          std::size_t hits = 0;
          for (double v : d) hits += v < rad ? 1 : 0;
          auto& b = buffers[a * nm + q];
          b.coverages[j] = static_cast<double>(hits) / static_cast<double>(tests);
          b.radii[j] = rad;
          b.mses[j] = sq / static_cast<double>(tests);
        }
      }
    });

    const double secs = seconds_since(t0);
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t q = 0; q < nm; ++q) {
        auto& b = buffers[a * nm + q];
        CoverageCell cell;
        cell.n = n;
        cell.alpha = c.alphas[a];
        cell.method = methods[q];
        cell.coverage = mean(b.coverages);
        cell.sd = sample_sd(b.coverages);
        cell.coverages = std::move(b.coverages);
        cell.radii = std::move(b.radii);
        cell.mses = std::move(b.mses);
        cell.seconds = secs;
        report.cells.push_back(std::move(cell));
      }
  }
  return report;
}

// Linear interpolation between order statistics (the usual type 7 sample quantile).
double sample_quantile(std::vector<double> v, double p) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const double h = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  if (std::isinf(v[lo]) || std::isinf(v[hi])) return v[hi];
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::string fmt(double v) { return format_real(v); }

std::string fmt_seconds(const ExperimentConfig& c, double s) {
  if (!c.timings || s < 0.0) return "NA";
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(3);
  out << s;
  return out.str();
}

void header(std::ostream& out, const ExperimentConfig& c, const std::vector<std::string>& columns) {
  out << metadata_line(c.seed, c.hash()) << '\n' << csv_row(columns) << '\n';
}

std::vector<BallMethod> both_methods() { return {BallMethod::OOB, BallMethod::SplitConformal}; }

}  // namespace

const CoverageCell& CoverageReport::cell(std::size_t n, double alpha, BallMethod method) const {
  for (const auto& c : cells)
    if (c.n == n && c.alpha == alpha && c.method == method) return c;
  throw InvalidArgument("no coverage cell for n=" + std::to_string(n) + ", alpha=" + format_real(alpha) +
                        ", method=" + ball_method_name(method));
}

CoverageReport estimate_type_I(const ExperimentConfig& config, const ProgressFn& progress) {
  return run_paired(config, ExperimentKind::TypeI, false, progress);
}

CoverageReport estimate_type_III(const ExperimentConfig& config, const ProgressFn& progress) {
  return run_paired(config, ExperimentKind::TypeIII, true, progress);
}

CoverageReport estimate_type_II(const ExperimentConfig& config, const ProgressFn& progress) {
  return run_per_replicate(config, ExperimentKind::TypeII, false, config.methods, config.mc, progress);
}

CoverageReport estimate_type_IV(const ExperimentConfig& config, const ProgressFn& progress) {
  return run_per_replicate(config, ExperimentKind::TypeIV, true, config.methods, config.mc, progress);
}

CoverageReport compare_mse(const ExperimentConfig& config, const ProgressFn& progress) {
  return run_per_replicate(config, ExperimentKind::Mse, false, both_methods(), config.test_draws, progress);
}

std::vector<RadiusVolumeCell> compare_radius_volume(const ExperimentConfig& config, const ProgressFn& progress) {
  config.validate();
  const Rng root(config.seed);
  const int threads = resolve_threads(config.threads);
  const std::size_t reps = config.replicates;
  const std::size_t na = config.alphas.size();
  std::vector<RadiusVolumeCell> out;
  for (std::size_t q : config.qs) {
    ScenarioSpec spec = config.scenario;
    spec.q = q;
    const Scenario scenario(spec);
    const Rng qroot = root.child(q);
    for (std::size_t n : config.ns) {
      say(progress, "radius_volume: q=" + std::to_string(q) + ", n=" + std::to_string(n));
      std::vector<RadiusVolumeCell> cells(na);
      for (std::size_t a = 0; a < na; ++a) {
        cells[a].q = q;
        cells[a].n = n;
        cells[a].alpha = config.alphas[a];
        cells[a].oob_radii.assign(reps, 0.0);
        cells[a].sc_radii.assign(reps, 0.0);
      }
      parallel_for(reps, threads, [&](std::size_t j) {
        const Dataset data = replicate_data(scenario, qroot, n, j);
        const Fitted f = fit_replicate(data, config, config.flavor, both_methods(), qroot, n, j);
        for (std::size_t a = 0; a < na; ++a) {
          cells[a].oob_radii[j] = f.radius(BallMethod::OOB, config.alphas[a]);
          cells[a].sc_radii[j] = f.radius(BallMethod::SplitConformal, config.alphas[a]);
        }
      });
      for (auto& cell : cells) {
        for (std::size_t j = 0; j < reps; ++j) {
          const double rel = (cell.sc_radii[j] - cell.oob_radii[j]) / cell.oob_radii[j];
          cell.radius_rel.push_back(rel);
          cell.volume_rel.push_back(std::pow(1.0 + rel, static_cast<double>(q)) - 1.0);
        }
        out.push_back(std::move(cell));
      }
    }
  }
  return out;
}

std::vector<SpheroidStudyCell> spheroid_anisotropy_study(const ExperimentConfig& config,
                                                         const ProgressFn& progress) {
  config.validate();
  ScenarioSpec spec = config.scenario;
  spec.spheroid_a = 1.0;
  spec.spheroid_c = 1.0;
  const Scenario scenario(spec);
  const Rng root(config.seed);
  const int threads = resolve_threads(config.threads);
  const std::size_t reps = config.replicates, tests = config.test_draws;
  const std::size_t na = config.alphas.size();
  const SpaceDescriptor s2 = SpaceDescriptor::sphere(2);

  std::vector<double> axes{1.0};
  for (double a : config.spheroid_a)
    if (a != 1.0 && std::find(axes.begin(), axes.end(), a) == axes.end()) axes.push_back(a);
  const std::size_t ng = axes.size();
  const std::size_t units = reps * tests;

  std::vector<SpheroidStudyCell> out;
  for (std::size_t n : config.ns) {
    say(progress, "spheroid: n=" + std::to_string(n) + ", " + std::to_string(ng) + " axis values");
    // errors[g][unit], areas[a][g][unit], covered[a][g][unit]
    std::vector<std::vector<double>> errors(ng, std::vector<double>(units));
    std::vector<std::vector<std::vector<double>>> areas(na, errors), covered(na, errors);

    parallel_for(reps, threads, [&](std::size_t j) {
      const Dataset data = replicate_data(scenario, root, n, j);
      std::vector<std::vector<double>> tx(tests), ty(tests);
      Rng r = root.child({kTest, n, j});
      for (std::size_t t = 0; t < tests; ++t) {
        tx[t] = scenario.draw_predictor(r);
        ty[t] = scenario.draw_response(tx[t], r);
      }
      const std::uint64_t seed = draw_seed(root, {kForest, n, j});
      for (std::size_t g = 0; g < ng; ++g) {
        Dataset mapped(data.predictor_space(), SpaceDescriptor::spheroid(axes[g], 1.0));
        mapped.reserve(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) mapped.add(data.predictor(i), data.responses()[i]);
        const ForestModel model = fit_tuned(mapped, config, Flavor::MRF, seed);
        const OobErrorSet oob = compute_oob_errors(model, 1);
        std::vector<double> radii(na);
        for (std::size_t a = 0; a < na; ++a) radii[a] = empirical_quantile(oob, config.alphas[a]);
        for (std::size_t t = 0; t < tests; ++t) {
          const MetricPoint center = model.predict(tx[t]);
          const double e = distance(s2, center.coords, ty[t]);
          const std::size_t u = j * tests + t;
          errors[g][u] = e * e;
          for (std::size_t a = 0; a < na; ++a) {
            const PredictionBall ball{center, radii[a], BallMethod::OOB, config.alphas[a]};
            areas[a][g][u] = spheroid_ball_area(ball, config.area_directions);
            covered[a][g][u] = ball.contains(ty[t]) ? 1.0 : 0.0;
          }
        }
      }
    });

    for (std::size_t a = 0; a < na; ++a) {
      SpheroidStudyCell cell;
      cell.n = n;
      cell.alpha = config.alphas[a];
      std::vector<double> p_mse, p_area;
      for (std::size_t g = 0; g < ng; ++g) {
        SpheroidRow row;
        row.a = axes[g];
        row.errors = errors[g];
        row.areas = areas[a][g];
        row.mse = mean(row.errors);
        row.area = mean(row.areas);
        row.coverage = mean(covered[a][g]);
        if (g > 0) {
          p_mse.push_back(paired_t_test_less(errors[0], errors[g]));
          p_area.push_back(paired_t_test_less(areas[a][g], areas[a][0]));
        }
        cell.rows.push_back(std::move(row));
      }
      const auto adj_mse = benjamini_yekutieli(p_mse), adj_area = benjamini_yekutieli(p_area);
      const SpheroidRow& base = cell.rows[0];
      for (std::size_t g = 0; g < ng; ++g) {
        SpheroidRow& row = cell.rows[g];
        row.delta_mse = 100.0 * (row.mse - base.mse) / base.mse;
        row.delta_area = 100.0 * (row.area - base.area) / base.area;
        if (g > 0) {
          row.p_mse = adj_mse[g - 1];
          row.p_area = adj_area[g - 1];
        }
      }
      out.push_back(std::move(cell));
    }
  }
  return out;
}

void write_coverage_csv(std::ostream& out, const ExperimentConfig& c, const CoverageReport& report) {
  header(out, c,
         {"scenario", "n", "alpha", "method", "coverage", "sd", "radius_mean", "radius_sd", "mse_mean", "mse_sd",
          "seconds"});
  for (const auto& cell : report.cells)
    out << csv_row({report.scenario, std::to_string(cell.n), fmt(cell.alpha), ball_method_name(cell.method),
                    fmt(cell.coverage), fmt(cell.sd), fmt(mean(cell.radii)), fmt(sample_sd(cell.radii)),
                    fmt(mean(cell.mses)), fmt(sample_sd(cell.mses)), fmt_seconds(c, cell.seconds)})
        << '\n';
}

void write_coverage_replicates_csv(std::ostream& out, const ExperimentConfig& c, const CoverageReport& report) {
  header(out, c, {"scenario", "n", "alpha", "method", "replicate", "coverage", "radius", "mse"});
  for (const auto& cell : report.cells)
    for (std::size_t j = 0; j < cell.coverages.size(); ++j)
      out << csv_row({report.scenario, std::to_string(cell.n), fmt(cell.alpha), ball_method_name(cell.method),
                      std::to_string(j), fmt(cell.coverages[j]), fmt(cell.radii[j]), fmt(cell.mses[j])})
          << '\n';
}

void write_coverage_quantiles_csv(std::ostream& out, const ExperimentConfig& c, const CoverageReport& report) {
  header(out, c, {"scenario", "n", "alpha", "method", "min", "q05", "q25", "median", "q75", "q95", "max"});
  for (const auto& cell : report.cells) {
    std::vector<std::string> row{report.scenario, std::to_string(cell.n), fmt(cell.alpha),
                                 ball_method_name(cell.method)};
    for (double p : {0.0, 0.05, 0.25, 0.5, 0.75, 0.95, 1.0}) row.push_back(fmt(sample_quantile(cell.coverages, p)));
    out << csv_row(row) << '\n';
  }
}

void write_radius_volume_csv(std::ostream& out, const ExperimentConfig& c, const std::vector<RadiusVolumeCell>& cells) {
  header(out, c,
         {"q", "n", "alpha", "oob_radius_median", "sc_radius_median", "radius_rel_q25", "radius_rel_median",
          "radius_rel_q75", "volume_rel_q25", "volume_rel_median", "volume_rel_q75"});
  for (const auto& cell : cells)
    out << csv_row({std::to_string(cell.q), std::to_string(cell.n), fmt(cell.alpha),
                    fmt(sample_quantile(cell.oob_radii, 0.5)), fmt(sample_quantile(cell.sc_radii, 0.5)),
                    fmt(sample_quantile(cell.radius_rel, 0.25)), fmt(sample_quantile(cell.radius_rel, 0.5)),
                    fmt(sample_quantile(cell.radius_rel, 0.75)), fmt(sample_quantile(cell.volume_rel, 0.25)),
                    fmt(sample_quantile(cell.volume_rel, 0.5)), fmt(sample_quantile(cell.volume_rel, 0.75))})
        << '\n';
}

void write_radius_volume_replicates_csv(std::ostream& out, const ExperimentConfig& c,
                                        const std::vector<RadiusVolumeCell>& cells) {
  header(out, c, {"q", "n", "alpha", "replicate", "oob_radius", "sc_radius", "radius_rel", "volume_rel"});
  for (const auto& cell : cells)
    for (std::size_t j = 0; j < cell.oob_radii.size(); ++j)
      out << csv_row({std::to_string(cell.q), std::to_string(cell.n), fmt(cell.alpha), std::to_string(j),
                      fmt(cell.oob_radii[j]), fmt(cell.sc_radii[j]), fmt(cell.radius_rel[j]),
                      fmt(cell.volume_rel[j])})
          << '\n';
}

void write_spheroid_csv(std::ostream& out, const ExperimentConfig& c, const std::vector<SpheroidStudyCell>& cells) {
  header(out, c,
         {"n", "alpha", "a", "mse", "area", "coverage", "delta_mse_pct", "delta_area_pct", "p_mse_by", "p_area_by",
          "units"});
  for (const auto& cell : cells)
    for (const auto& row : cell.rows)
      out << csv_row({std::to_string(cell.n), fmt(cell.alpha), fmt(row.a), fmt(row.mse), fmt(row.area),
                      fmt(row.coverage), fmt(row.delta_mse), fmt(row.delta_area), fmt(row.p_mse), fmt(row.p_area),
                      std::to_string(row.errors.size())})
          << '\n';
}

std::vector<std::string> run_experiment(const ExperimentConfig& config, const ProgressFn& progress) {
  config.validate();
  namespace fs = std::filesystem;
  fs::create_directories(config.output_dir);
  const std::string stem = (fs::path(config.output_dir) / (config.name + "_" + experiment_name(config.kind))).string();
  std::vector<std::string> paths;
  auto write = [&](const std::string& path, auto&& writer) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write '" + path + "'");
    writer(out);
    paths.push_back(path);
  };

  switch (config.kind) {
    case ExperimentKind::TypeI:
    case ExperimentKind::TypeII:
    case ExperimentKind::TypeIII:
    case ExperimentKind::TypeIV:
    case ExperimentKind::Mse: {
      CoverageReport report;
      switch (config.kind) {
        case ExperimentKind::TypeI:
          report = estimate_type_I(config, progress);
          break;
        case ExperimentKind::TypeII:
          report = estimate_type_II(config, progress);
          break;
        case ExperimentKind::TypeIII:
          report = estimate_type_III(config, progress);
          break;
        case ExperimentKind::TypeIV:
          report = estimate_type_IV(config, progress);
          break;
        default:
          report = compare_mse(config, progress);
      }
      write(stem + ".csv", [&](std::ostream& o) { write_coverage_csv(o, config, report); });
      write(stem + "_replicates.csv", [&](std::ostream& o) { write_coverage_replicates_csv(o, config, report); });
      if (config.kind != ExperimentKind::TypeI && config.kind != ExperimentKind::TypeIII)
        write(stem + "_quantiles.csv", [&](std::ostream& o) { write_coverage_quantiles_csv(o, config, report); });
      break;
    }
    case ExperimentKind::RadiusVolume: {
      const auto cells = compare_radius_volume(config, progress);
      write(stem + ".csv", [&](std::ostream& o) { write_radius_volume_csv(o, config, cells); });
      write(stem + "_replicates.csv", [&](std::ostream& o) { write_radius_volume_replicates_csv(o, config, cells); });
      break;
    }
    case ExperimentKind::SpheroidStudy: {
      const auto cells = spheroid_anisotropy_study(config, progress);
      write(stem + ".csv", [&](std::ostream& o) { write_spheroid_csv(o, config, cells); });
      break;
    }
  }
  return paths;
}

}  // namespace oobball
