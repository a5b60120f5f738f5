#pragma once

#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "oobball/balls.hpp"
#include "oobball/config.hpp"

namespace oobball {

// Progress messages (sent to standard error by the CLI).
using ProgressFn = std::function<void(const std::string&)>;

// One (n, alpha, method) cell of a coverage table.
struct CoverageCell {
  std::size_t n = 0;
  double alpha = 0.1;
  BallMethod method = BallMethod::OOB;
  double coverage = 0.0;
  // Bootstrap SD for Types I and III; SD of the per-replicate estimates otherwise.
  double sd = 0.0;
  // Types I and III: the diagonal indicators; otherwise the per-replicate coverage estimates.
  std::vector<double> coverages;
  std::vector<double> radii;  // per replicate
  std::vector<double> mses;   // per replicate squared prediction error (mean over test pairs)
  double seconds = -1.0;      // wall-clock time of the n block; negative when not measured
};

struct CoverageReport {
  ExperimentKind kind = ExperimentKind::TypeI;
  std::string scenario;
  std::vector<double> x0;  // Types III and IV
  std::vector<CoverageCell> cells;

  const CoverageCell& cell(std::size_t n, double alpha, BallMethod method) const;
};

// Marginal coverage: M datasets and forests, M fresh test pairs, indicator (j, k) records
// whether pair k falls in the ball of forest j. The estimate is the diagonal mean.
CoverageReport estimate_type_I(const ExperimentConfig& config, const ProgressFn& progress = {});
// Conditional on the training set: N datasets, each tested on M fresh pairs.
CoverageReport estimate_type_II(const ExperimentConfig& config, const ProgressFn& progress = {});
// Conditional on X = x0: M datasets, M draws of Y given x0.
CoverageReport estimate_type_III(const ExperimentConfig& config, const ProgressFn& progress = {});
// Conditional on both: N datasets, each tested on M draws of Y given x0.
CoverageReport estimate_type_IV(const ExperimentConfig& config, const ProgressFn& progress = {});

// Per replicate dataset of size n: OOB forest on the full sample and SC forest on half of it,
// both scored on `test_draws` fresh pairs. Coverage columns hold Type II estimates.
CoverageReport compare_mse(const ExperimentConfig& config, const ProgressFn& progress = {});

struct RadiusVolumeCell {
  std::size_t q = 1;
  std::size_t n = 0;
  double alpha = 0.1;
  std::vector<double> oob_radii;
  std::vector<double> sc_radii;
  std::vector<double> radius_rel;  // (r_SC - r_OOB) / r_OOB
  std::vector<double> volume_rel;  // (1 + radius_rel)^q - 1
};

// Relative error of SC radii and volumes with respect to OOB over q in config.qs.
std::vector<RadiusVolumeCell> compare_radius_volume(const ExperimentConfig& config, const ProgressFn& progress = {});

struct SpheroidRow {
  double a = 1.0;
  double mse = 0.0;       // mean squared geodesic error on S^2
  double area = 0.0;      // mean ball area on S^2
  double coverage = 0.0;  // Type II, pooled over replicates
  double delta_mse = 0.0;   // percent change relative to a = 1
  double delta_area = 0.0;  // percent change relative to a = 1
  double p_mse = 1.0;       // H1: MSE(a = 1) < MSE(a), BY adjusted
  double p_area = 1.0;      // H1: area(a = 1) > area(a), BY adjusted
  std::vector<double> errors;  // per (replicate, test point)
  std::vector<double> areas;
};

struct SpheroidStudyCell {
  std::size_t n = 0;
  double alpha = 0.1;
  std::vector<SpheroidRow> rows;  // one per a, a = 1 first
};

// Medoid forests with the spheroid-induced response metric d_{a,1} compared with a = 1 on
// synthetic longitude-dominant sphere data. Paired one-sided t-tests over test points with
// Benjamini-Yekutieli adjustment within each family (MSE, area).
std::vector<SpheroidStudyCell> spheroid_anisotropy_study(const ExperimentConfig& config,
                                                         const ProgressFn& progress = {});

// CSV writers. Every file starts with the metadata comment line.
void write_coverage_csv(std::ostream& out, const ExperimentConfig& config, const CoverageReport& report);
void write_coverage_replicates_csv(std::ostream& out, const ExperimentConfig& config, const CoverageReport& report);
// Quantiles of the per-replicate estimates (Types II and IV and the MSE comparison).
void write_coverage_quantiles_csv(std::ostream& out, const ExperimentConfig& config, const CoverageReport& report);
void write_radius_volume_csv(std::ostream& out, const ExperimentConfig& config,
                             const std::vector<RadiusVolumeCell>& cells);
void write_radius_volume_replicates_csv(std::ostream& out, const ExperimentConfig& config,
                                        const std::vector<RadiusVolumeCell>& cells);
void write_spheroid_csv(std::ostream& out, const ExperimentConfig& config, const std::vector<SpheroidStudyCell>& cells);

// Runs the configured experiment and writes its CSVs to config.output_dir. Returns the paths.
std::vector<std::string> run_experiment(const ExperimentConfig& config, const ProgressFn& progress = {});

}  // namespace oobball
