#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oobball/dataset.hpp"
#include "oobball/forest.hpp"
#include "oobball/rng.hpp"
#include "oobball/scenario.hpp"
#include "oobball/space.hpp"

namespace oobball {

enum class BallMethod { OOB, SplitConformal, Population };

std::string ball_method_name(BallMethod method);
BallMethod parse_ball_method(std::string_view name);

// {y : d(center, y) < radius}. An infinite radius is the whole space.
struct PredictionBall {
  MetricPoint center;
  double radius = 0.0;
  BallMethod method = BallMethod::OOB;
  double alpha = 0.1;

  bool contains(std::span<const double> y) const;
};

struct OobErrorSet {
  std::vector<double> errors;         // R_i = d(Y_i, Yhat_(i)) for retained observations
  std::vector<std::size_t> indices;   // training index of each retained error
  std::vector<std::size_t> dropped;   // observations that are in-bag for every tree
};

// One OOB radial error per observation with at least one OOB tree. Throws InvalidArgument when
// every observation is dropped.
OobErrorSet compute_oob_errors(const ForestModel& model, int threads = 1);

// ceil((1 - alpha) k)-th order statistic of the k errors.
double empirical_quantile(std::span<const double> errors, double alpha);
double empirical_quantile(const OobErrorSet& errors, double alpha);

// ceil((1 - alpha)(k + 1))-th order statistic, +infinity when that rank exceeds k.
double conformal_quantile(std::span<const double> residuals, double alpha);

PredictionBall oob_ball(const ForestModel& model, const OobErrorSet& errors, std::span<const double> x, double alpha);
PredictionBall oob_ball(const ForestModel& model, std::span<const double> x, double alpha);

// Experimental in-sample ball for training point i: center is the OOB prediction of i and the
// radius uses errors of j != i predicted only by trees where both i and j are out of bag.
// Observations with fewer than `min_trees` such trees are skipped.
PredictionBall doubly_oob_ball(const ForestModel& model, std::size_t i, double alpha, std::size_t min_trees = 1);

// Random floor(n/2) / ceil(n/2) split of {0, ..., n-1}; the first part trains, the second calibrates.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_halves(std::size_t n, Rng& rng);

struct SplitConformalModel {
  ForestModel model;
  std::vector<double> residuals;  // d(Y_i, Yhat(X_i)) over the calibration half
};

// Residuals of a fitted forest on calibration data.
std::vector<double> calibration_residuals(const ForestModel& model, const Dataset& calibration);

// Halves the data with `rng`, fits on the first half and calibrates on the second. Needs n >= 4.
SplitConformalModel split_conformal_fit(const Dataset& data, Flavor flavor, const ForestParams& params, Rng& rng);

PredictionBall split_conformal_ball(const SplitConformalModel& sc, std::span<const double> x, double alpha);

// Ball centred at the conditional Frechet mean with the (1 - alpha) quantile of d(Y, m(x))
// given X = x. Closed forms for Gaussian errors with identity covariance, Monte Carlo otherwise.
PredictionBall population_ball(const Scenario& scenario, std::span<const double> x, double alpha, Rng& rng,
                               std::size_t draws = 1000000);

// Conditional Frechet mean of Y given X = x for a scenario (Monte Carlo only for SPD-LE).
MetricPoint scenario_conditional_mean(const Scenario& scenario, std::span<const double> x, Rng& rng,
                                      std::size_t draws = 200000);

struct VolumeEstimate {
  double value = 0.0;
  double standard_error = 0.0;  // zero for closed forms
};

// Euclidean volume, spherical cap area on S^2, or a Monte Carlo area of the membership region
// on S^2 for the spheroid-induced metric. The Monte Carlo draws are uniform on the cap of
// angular radius r / min(a, c), which contains the region.
VolumeEstimate ball_volume(const PredictionBall& ball, Rng& rng, std::size_t draws = 1000000);

// Area of a spheroid-induced ball on S^2 by quadrature over `directions` equally spaced
// bearings, assuming the ball is star-shaped about its center. Deterministic and much cheaper
// than the Monte Carlo estimate.
double spheroid_ball_area(const PredictionBall& ball, std::size_t directions = 64);

// Points at distance exactly `radius` from the center along random geodesic directions.
std::vector<std::vector<double>> boundary_sample(const PredictionBall& ball, std::size_t count, Rng& rng);

}  // namespace oobball
