#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oobball/balls.hpp"
#include "oobball/forest.hpp"
#include "oobball/scenario.hpp"

namespace oobball {

enum class ExperimentKind { TypeI, TypeII, TypeIII, TypeIV, Mse, RadiusVolume, SpheroidStudy };

std::string experiment_name(ExperimentKind kind);

// Configuration of one Monte Carlo experiment. The textual schema (docs/config.md) uses
// `key = value` lines grouped under [experiment], [scenario], [forest] and [run] sections;
// dotted keys such as `forest.trees` are accepted anywhere.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::TypeI;
  std::string name = "experiment";
  ScenarioSpec scenario;
  Flavor flavor = Flavor::RFWLCFR;
  std::vector<double> alphas{0.10};
  std::vector<std::size_t> ns{200};
  std::size_t replicates = 200;  // N: datasets for Types II and IV and for comparisons
  std::size_t mc = 500;          // M: Monte Carlo size
  std::size_t bootstrap = 200;   // K: bootstrap resamples for the SD of Types I and III
  ForestParams forest;           // trees, mtry and min split size when tuning is off
  bool tune = true;
  std::size_t tune_trees = 0;    // trees inside the CV search; 0 uses forest.trees
  std::size_t folds = 5;
  std::optional<double> x0_quantile;  // x0 as the predictor quantile at this level
  std::vector<double> x0;             // explicit x0 (overrides x0_quantile)
  std::vector<BallMethod> methods{BallMethod::OOB};
  std::size_t test_draws = 1000;      // fresh test pairs for MSE comparisons and the spheroid study
  std::vector<double> spheroid_a{0.5, 0.75, 1.0, 1.25};  // c = 1
  std::vector<std::size_t> qs{1, 5, 10};                // response dimensions for radius/volume
  std::size_t area_directions = 64;
  std::uint64_t seed = 1;
  int threads = 0;                    // 0 = all hardware threads; never changes results
  bool timings = false;               // write wall-clock seconds instead of NA
  std::string output_dir = ".";
  bool paper_scale = false;

  // M = N = 1000, K = 500.
  void apply_paper_scale();
  // Throws InvalidArgument naming the offending key.
  void validate() const;
  // Resolved x0 (explicit or from the quantile level); empty when neither is set.
  std::vector<double> resolved_x0() const;
  // Canonical text of every result-affecting setting (threads and output paths excluded).
  std::string canonical() const;
  std::uint64_t hash() const;
};

ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

// Applies one `key=value` override, as given on the command line.
void apply_config_override(ExperimentConfig& config, const std::string& assignment);

}  // namespace oobball
