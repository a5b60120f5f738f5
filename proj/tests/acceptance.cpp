// Acceptance run: one PASS/FAIL line per criterion, then supplementary invariant lines.
// Exit status is nonzero when any line fails.

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oobball/balls.hpp"
#include "oobball/config.hpp"
#include "oobball/errors.hpp"
#include "oobball/forest.hpp"
#include "oobball/harness.hpp"
#include "oobball/metric.hpp"
#include "oobball/scenario.hpp"
#include "oobball/stats.hpp"
#include "oobball/validation.hpp"

using namespace oobball;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(const std::string& id, const std::string& name, bool passed, const std::string& detail, double secs) {
  if (!passed) ++failures;
  std::cout << (passed ? "PASS " : "FAIL ") << id << ' ' << name << ": " << detail;
  std::cout.precision(1);
  std::cout << std::fixed << " (" << secs << " s)" << std::defaultfloat << std::endl;
  std::cout.precision(6);
}

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int digits = 4) {
  std::ostringstream o;
  o.precision(digits);
  o << v;
  return o.str();
}

void progress(const std::string& message) { std::cerr << "  " << message << '\n'; }

std::string first_failure(const ValidationReport& r) {
  for (const auto& c : r.checks)
    if (!c.passed) return c.name + " = " + fmt(c.value, 6) + " vs " + fmt(c.tolerance, 6);
  return {};
}

void criterion_geometry() {
  const auto t0 = Clock::now();
  const auto r = validate_geometry(GeometryConfig{});
  const double secs = since(t0);
  const bool ok = r.passed() && secs < 120.0;
  report("C1", "geometry suite", ok,
         std::to_string(r.checks.size()) + " checks on 10000 triples" + (r.passed() ? "" : ", first failure " + first_failure(r)),
         secs);
}

void criterion_means() {
  const auto t0 = Clock::now();
  const auto r = validate_frechet_means(MeansConfig{});
  const double secs = since(t0);
  const auto steps = [&](std::size_t idx, double target) { return std::abs(r.t[idx] - target) / r.step; };
  std::string detail = "AI argmin t=" + fmt(r.t[r.ai_argmin]) + " (" + fmt(steps(r.ai_argmin, 0.0), 3) +
                       " steps from 0), LC argmin t=" + fmt(r.t[r.lc_argmin]) + " (" +
                       fmt(steps(r.lc_argmin, 1.0), 3) + " steps from 1), tolerance 1 step";
  report("C2", "closed-form Wishart means", r.report.passed() && secs < 300.0, detail, secs);
}

void criterion_hvmf() {
  const auto t0 = Clock::now();
  const auto r = validate_hvmf(1, 100000);
  const double secs = since(t0);
  double worst = 0.0, mean_dist = 0.0;
  for (const auto& c : r.checks) {
    if (c.name.find("constant") != std::string::npos) worst = std::max(worst, c.value);
    else mean_dist = c.value;
  }
  report("C3", "HvMF normalizer and mean", r.passed() && secs < 120.0,
         "max relative constant error " + fmt(worst, 3) + ", Frechet mean distance " + fmt(mean_dist, 3), secs);
}

ExperimentConfig euclidean_base() {
  ExperimentConfig c;
  c.scenario.kind = ScenarioKind::EuclideanLinear;
  c.scenario.sigma = std::sqrt(3.0) / 2.0;
  c.seed = 2024;
  c.threads = 0;
  return c;
}

bool alpha_monotone(const CoverageReport& r, std::size_t n, BallMethod m, const std::vector<double>& alphas) {
  std::vector<double> sorted = alphas;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (r.cell(n, sorted[i], m).coverage > r.cell(n, sorted[i - 1], m).coverage) return false;
  return true;
}

std::vector<std::string> monotone_notes;

void criterion_type1() {
  const auto t0 = Clock::now();
  auto c = euclidean_base();
  c.kind = ExperimentKind::TypeI;
  c.ns = {200};
  c.alphas = {0.01, 0.05, 0.10};
  c.mc = 500;
  c.bootstrap = 200;
  const auto r = estimate_type_I(c, progress);
  const auto& cell = r.cell(200, 0.10, BallMethod::OOB);
  const bool ok = cell.coverage >= 0.84 && cell.coverage <= 0.93;
  report("C4", "Euclidean type I coverage", ok,
         "OOB coverage " + fmt(cell.coverage) + " (bootstrap sd " + fmt(cell.sd, 3) + ") in [0.84, 0.93]", since(t0));
  monotone_notes.push_back(std::string("euclidean type I ") + (alpha_monotone(r, 200, BallMethod::OOB, c.alphas) ? "ok" : "violated"));
}

void criterion_efficiency() {
  const auto t0 = Clock::now();
  auto c = euclidean_base();
  c.kind = ExperimentKind::Mse;
  c.ns = {50, 100, 200};
  c.alphas = {0.10};
  c.replicates = 100;
  c.test_draws = 500;
  const auto r = compare_mse(c, progress);
  const double sc200 = mean(r.cell(200, 0.10, BallMethod::SplitConformal).mses);
  const double oob100 = mean(r.cell(100, 0.10, BallMethod::OOB).mses);
  const double ratio = sc200 / oob100;
  const double med_sc = median(r.cell(50, 0.10, BallMethod::SplitConformal).radii);
  const double med_oob = median(r.cell(50, 0.10, BallMethod::OOB).radii);
  const bool ok = ratio >= 0.85 && ratio <= 1.15 && med_sc > med_oob;
  report("C5", "OOB vs split-conformal efficiency", ok,
         "MSE(SC, n=200) / MSE(OOB, n=100) = " + fmt(ratio) + " in [0.85, 1.15]; median radius at n=50 SC " +
             fmt(med_sc) + " > OOB " + fmt(med_oob),
         since(t0));
}

void criterion_sphere_type3() {
  const auto t0 = Clock::now();
  ExperimentConfig c;
  c.kind = ExperimentKind::TypeIII;
  c.scenario.kind = ScenarioKind::SphereGreatCircle;
  c.scenario.kappa = 50.0;
  c.ns = {200};
  c.alphas = {0.01, 0.05, 0.10};
  c.x0_quantile = 0.25;
  c.mc = 500;
  c.bootstrap = 200;
  c.seed = 2025;
  c.threads = 0;
  const auto r = estimate_type_III(c, progress);
  const auto& cell = r.cell(200, 0.05, BallMethod::OOB);
  const bool ok = cell.coverage >= 0.91 && cell.coverage <= 0.98;
  report("C6", "sphere type III coverage", ok,
         "OOB coverage " + fmt(cell.coverage) + " (bootstrap sd " + fmt(cell.sd, 3) + ") in [0.91, 0.98] at x0 = (" +
             fmt(r.x0[0]) + ", " + fmt(r.x0[1]) + ")",
         since(t0));
  monotone_notes.push_back(std::string("sphere type III ") + (alpha_monotone(r, 200, BallMethod::OOB, c.alphas) ? "ok" : "violated"));
}

void criterion_conformal() {
  const auto t0 = Clock::now();
  auto c = euclidean_base();
  c.kind = ExperimentKind::TypeII;
  c.ns = {50};
  c.alphas = {0.10};
  c.methods = {BallMethod::SplitConformal};
  c.replicates = 2000;
  c.mc = 100;
  c.tune = false;
  c.seed = 2026;
  const auto r = estimate_type_II(c, progress);
  const auto& cell = r.cell(50, 0.10, BallMethod::SplitConformal);
  const double se = cell.sd / std::sqrt(static_cast<double>(cell.coverages.size()));
  const double floor = 0.90 - 3.0 * se;
  report("C7", "split-conformal finite-sample coverage", cell.coverage >= floor,
         "marginal coverage " + fmt(cell.coverage) + " >= " + fmt(floor) + " (MC SE " + fmt(se, 3) + ")", since(t0));
}

// Walks a tree from the root with the bootstrap multiset, checking that every split partitions
// its members, that leaves hold exactly the members routed to them and that every accepted
// split has positive gain.
struct TreeAudit {
  bool partition_ok = true;
  double min_gain = std::numeric_limits<double>::infinity();
};

void audit_tree(const ForestModel& model, const Tree& tree, TreeAudit& audit) {
  const Dataset& data = model.training();
  const bool medoid = model.flavor() == Flavor::MRF;
  std::vector<std::uint32_t> root;
  for (std::size_t i = 0; i < tree.counts.size(); ++i)
    for (std::uint16_t k = 0; k < tree.counts[i]; ++k) root.push_back(static_cast<std::uint32_t>(i));
  std::vector<std::pair<std::int32_t, std::vector<std::uint32_t>>> stack{{0, root}};
  while (!stack.empty()) {
    auto [id, members] = std::move(stack.back());
    stack.pop_back();
    const TreeNode& node = tree.nodes[id];
    if (node.is_leaf()) {
      auto a = members, b = node.members;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (a != b) audit.partition_ok = false;
      continue;
    }
    std::vector<std::uint32_t> l, r;
    partition(data.feature(node.rule.feature), node.rule, members, l, r);
    if (l.empty() || r.empty() || l.size() + r.size() != members.size()) audit.partition_ok = false;
    audit.min_gain = std::min(audit.min_gain, cart_gain(data.responses(), members, l, r, medoid, model.response_distances()));
    stack.push_back({node.left, std::move(l)});
    stack.push_back({node.right, std::move(r)});
  }
}

void criterion_structure() {
  const auto t0 = Clock::now();
  const std::array<ScenarioKind, 7> kinds{ScenarioKind::EuclideanLinear,   ScenarioKind::EuclideanMultivariate,
                                          ScenarioKind::SphereGreatCircle, ScenarioKind::HyperboloidMeridian,
                                          ScenarioKind::SPDWishartInterp,  ScenarioKind::QuantileGridModel,
                                          ScenarioKind::SphereAnisotropic};
  const std::array<Flavor, 3> flavors{Flavor::FRF, Flavor::RFWLCFR, Flavor::MRF};
  bool partition_ok = true, isolation_ok = true;
  double min_gain = std::numeric_limits<double>::infinity(), weight_err = 0.0, frf_gap = 0.0, oob_gap = 0.0;
  std::size_t euclid_fixtures = 0;
  Rng root(8);
  for (std::size_t f = 0; f < 50; ++f) {
    Rng rng = root.child({f});
    ScenarioSpec spec;
    spec.kind = kinds[f % kinds.size()];
    spec.q = 1 + f % 3;
    spec.grid = 20;
    spec.n = 20 + rng.below(50);
    const Scenario scenario(spec);
    const Dataset data = scenario.generate(rng);
    const std::size_t p = data.predictor_space().arity();
    ForestParams params;
    params.trees = 1000;
    params.mtry = 1 + rng.below(p);
    params.min_split_size = std::array<std::size_t, 3>{1, 5, 10}[f % 3];
    params.seed = 1000 + f;
    const Flavor flavor = flavors[(f / kinds.size()) % flavors.size()];
    const ForestModel model = fit_forest(data, flavor, params);

    TreeAudit audit;
    for (std::size_t b = 0; b < 50; ++b) audit_tree(model, model.trees()[b], audit);
    partition_ok = partition_ok && audit.partition_ok;
    min_gain = std::min(min_gain, audit.min_gain);

    double oob = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) oob += static_cast<double>(model.oob_trees(i).size());
    oob_gap = std::max(oob_gap, std::abs(oob / static_cast<double>(data.size() * params.trees) - std::exp(-1.0)));

    std::vector<std::vector<double>> queries;
    for (int k = 0; k < 5; ++k) queries.push_back(scenario.draw_predictor(rng));
    for (const auto& x : queries) {
      double total = 0.0;
      for (double w : model.weights(x)) total += w;
      weight_err = std::max(weight_err, std::abs(total - 1.0));
    }

    // Replacing one response must not move that observation's OOB prediction.
    ForestParams small = params;
    small.trees = 100;
    const ForestModel a = fit_forest(data, flavor, small);
    Dataset changed(data.predictor_space(), data.response_space());
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto y = data.responses()[i == 0 ? 1 : i];
      changed.add(data.predictor(i), std::vector<double>(y.begin(), y.end()));
    }
    const ForestModel b = fit_forest(changed, flavor, small);
    if (!a.oob_trees(0).empty()) {
      const auto pa = a.oob_predict(0), pb = b.oob_predict(0);
      if (distance(data.response_space(), pa.coords, pb.coords) > 1e-12) isolation_ok = false;
    }

    if (data.response_space().kind() == SpaceKind::Euclidean) {
      ++euclid_fixtures;
      const ForestModel frf = fit_forest(data, Flavor::FRF, small);
      const ForestModel lcfr = fit_forest(data, Flavor::RFWLCFR, small);
      for (const auto& x : queries)
        frf_gap = std::max(frf_gap, distance(data.response_space(), frf.predict(x).coords, lcfr.predict(x).coords));
    }
  }
  const bool ok = partition_ok && min_gain > 0.0 && weight_err <= 1e-12 && frf_gap <= 1e-10 && isolation_ok &&
                  oob_gap <= 0.03 && euclid_fixtures > 0;
  report("C8", "forest structure on 50 fixtures", ok,
         std::string("partition ") + (partition_ok ? "ok" : "broken") + ", min accepted gain " + fmt(min_gain, 3) +
             ", max |sum w - 1| " + fmt(weight_err, 3) + ", FRF vs RFWLCFR gap " + fmt(frf_gap, 3) + " over " +
             std::to_string(euclid_fixtures) + " Euclidean fixtures, OOB isolation " + (isolation_ok ? "ok" : "broken") +
             ", max |OOB fraction - 1/e| " + fmt(oob_gap, 3) + " at B=1000",
         since(t0));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void criterion_determinism() {
  const auto t0 = Clock::now();
  const fs::path base = fs::temp_directory_path() / "oobball_acceptance_determinism";
  fs::remove_all(base);
  std::vector<ExperimentConfig> configs;
  for (auto kind : {ExperimentKind::TypeI, ExperimentKind::TypeII, ExperimentKind::TypeIII, ExperimentKind::TypeIV,
                    ExperimentKind::Mse, ExperimentKind::RadiusVolume, ExperimentKind::SpheroidStudy}) {
    ExperimentConfig c;
    c.kind = kind;
    c.name = "det";
    c.ns = {40};
    c.alphas = {0.1, 0.05};
    c.mc = 12;
    c.replicates = 6;
    c.bootstrap = 50;
    c.test_draws = 30;
    c.forest.trees = 40;
    c.tune = kind == ExperimentKind::TypeI;
    c.tune_trees = 20;
    c.methods = {BallMethod::OOB, BallMethod::SplitConformal};
    c.seed = 77;
    if (kind == ExperimentKind::TypeIII || kind == ExperimentKind::TypeIV) {
      c.scenario.kind = ScenarioKind::SphereGreatCircle;
      c.x0_quantile = 0.25;
    }
    if (kind == ExperimentKind::RadiusVolume) c.scenario.kind = ScenarioKind::EuclideanMultivariate;
    if (kind == ExperimentKind::SpheroidStudy) {
      c.scenario.kind = ScenarioKind::SphereAnisotropic;
      c.spheroid_a = {0.5, 1.0, 1.25};
      c.area_directions = 16;
    }
    configs.push_back(c);
  }
  std::size_t files = 0;
  bool identical = true;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::vector<std::string> outputs[2];
    for (int t = 0; t < 2; ++t) {
      auto c = configs[i];
      c.threads = t + 1;
      c.output_dir = (base / (std::to_string(i) + "_t" + std::to_string(t + 1))).string();
      outputs[t] = run_experiment(c);
    }
    if (outputs[0].size() != outputs[1].size() || outputs[0].empty()) identical = false;
    for (std::size_t k = 0; k < std::min(outputs[0].size(), outputs[1].size()); ++k) {
      ++files;
      if (slurp(outputs[0][k]) != slurp(outputs[1][k])) identical = false;
    }
  }
  fs::remove_all(base);
  report("C9", "determinism across thread counts", identical,
         std::to_string(files) + " CSV files from " + std::to_string(configs.size()) +
             " experiment kinds compared at 1 and 2 threads",
         since(t0));
}

void criterion_paper_scale(const std::string& cli) {
  const auto t0 = Clock::now();
  ExperimentConfig c;
  c.apply_paper_scale();
  bool ok = c.mc == 1000 && c.replicates == 1000 && c.bootstrap == 500;
  std::string detail = "config scale M=" + std::to_string(c.mc) + " N=" + std::to_string(c.replicates) +
                       " K=" + std::to_string(c.bootstrap);
  if (cli.empty()) {
    ok = false;
    detail += ", command-line binary not given";
  } else {
    std::string help;
    std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen((cli + " coverage --help 2>&1").c_str(), "r"), pclose);
    if (pipe) {
      std::array<char, 512> buf{};
      while (fgets(buf.data(), buf.size(), pipe.get())) help += buf.data();
    }
    const bool flag = help.find("--paper-scale") != std::string::npos;
    ok = ok && flag;
    detail += flag ? ", coverage --paper-scale present" : ", coverage --paper-scale missing";
  }
  report("C10", "paper-scale switch", ok, detail, since(t0));
}

// Supplementary invariants.

void invariant_alpha() {
  bool ok = !monotone_notes.empty();
  std::string detail;
  for (const auto& n : monotone_notes) {
    ok = ok && n.find("violated") == std::string::npos;
    detail += (detail.empty() ? "" : "; ") + n;
  }
  report("I1", "coverage nonincreasing in alpha", ok, detail.empty() ? "no cells recorded" : detail, 0.0);
}

void invariant_asymptotic() {
  const auto t0 = Clock::now();
  auto c = euclidean_base();
  c.ns = {50, 400};
  c.alphas = {0.10};
  c.tune = false;
  c.seed = 2027;
  c.kind = ExperimentKind::TypeI;
  c.mc = 300;
  c.bootstrap = 50;
  const auto r1 = estimate_type_I(c, progress);
  const double g1_50 = std::abs(r1.cell(50, 0.10, BallMethod::OOB).coverage - 0.90);
  const double g1_400 = std::abs(r1.cell(400, 0.10, BallMethod::OOB).coverage - 0.90);
  c.kind = ExperimentKind::TypeII;
  c.replicates = 100;
  c.mc = 200;
  const auto r2 = estimate_type_II(c, progress);
  auto gap = [&](std::size_t n) {
    std::vector<double> g;
    for (double v : r2.cell(n, 0.10, BallMethod::OOB).coverages) g.push_back(std::abs(v - 0.90));
    return median(g);
  };
  const double g2_50 = gap(50), g2_400 = gap(400);
  report("I2", "coverage error shrinks from n=50 to n=400", g1_400 <= g1_50 && g2_400 <= g2_50,
         "type I |cov - 0.9| " + fmt(g1_50, 3) + " -> " + fmt(g1_400, 3) + ", type II median " + fmt(g2_50, 3) +
             " -> " + fmt(g2_400, 3),
         since(t0));
}

void invariant_concentration() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  for (auto kind : {ScenarioKind::SphereGreatCircle, ScenarioKind::HyperboloidMeridian}) {
    double med[2];
    for (int k = 0; k < 2; ++k) {
      ExperimentConfig c;
      c.kind = ExperimentKind::TypeII;
      c.scenario.kind = kind;
      c.scenario.kappa = k == 0 ? 50.0 : 200.0;
      c.ns = {100};
      c.alphas = {0.10};
      c.replicates = 30;
      c.mc = 10;
      c.tune = false;
      c.forest.trees = 100;
      c.seed = 2028;
      c.threads = 0;
      med[k] = median(estimate_type_II(c).cell(100, 0.10, BallMethod::OOB).radii);
    }
    ok = ok && med[1] < med[0];
    detail += (detail.empty() ? "" : "; ") + scenario_name(kind) + " median radius " + fmt(med[0], 3) + " -> " +
              fmt(med[1], 3);
  }
  report("I3", "OOB radius shrinks as kappa grows 50 -> 200", ok, detail, since(t0));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::string cli;
  std::vector<std::string> only;
  app.add_option("--cli", cli, "Path to the oobball command-line binary");
  app.add_option("--only", only, "Run only these ids (C1..C10, I1..I3)")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  const std::set<std::string> selected(only.begin(), only.end());
  auto want = [&](const std::string& id) { return selected.empty() || selected.count(id) > 0; };

  const auto t0 = Clock::now();
  try {
    if (want("C1")) criterion_geometry();
    if (want("C2")) criterion_means();
    if (want("C3")) criterion_hvmf();
    if (want("C4")) criterion_type1();
    if (want("C5")) criterion_efficiency();
    if (want("C6")) criterion_sphere_type3();
    if (want("C7")) criterion_conformal();
    if (want("C8")) criterion_structure();
    if (want("C9")) criterion_determinism();
    if (want("C10")) criterion_paper_scale(cli);
    if (want("I1") && !monotone_notes.empty()) invariant_alpha();
    if (want("I2")) invariant_asymptotic();
    if (want("I3")) invariant_concentration();
  } catch (const std::exception& e) {
    std::cout << "FAIL acceptance run aborted: " << e.what() << std::endl;
    return 1;
  }
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << " in " << fmt(since(t0), 5)
            << " s" << std::endl;
  return failures == 0 ? 0 : 1;
}
