#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "oobball/space.hpp"

namespace oobball {

// Points with raw (unnormalized) weights.
struct WeightedSample {
  PointSet points;
  std::vector<double> weights;
};

// Non-owning view used on hot paths. `indices` selects points (repeats allowed, acting as
// multiplicities); empty means every point. `weights` aligns with the selection; empty means
// uniform.
struct SampleView {
  const PointSet* points = nullptr;
  std::span<const std::uint32_t> indices{};
  std::span<const double> weights{};

  std::size_t size() const { return indices.empty() ? points->size() : indices.size(); }
  std::span<const double> point(std::size_t k) const { return (*points)[indices.empty() ? k : indices[k]]; }
  std::size_t index(std::size_t k) const { return indices.empty() ? k : indices[k]; }
  double weight(std::size_t k) const { return weights.empty() ? 1.0 : weights[k]; }
};

SampleView view_of(const WeightedSample& sample);

enum class SolveMethod { ClosedForm, GradientDescent, Medoid };

struct FrechetSolveReport {
  MetricPoint minimizer;
  double objective = 0.0;  // normalized weighted functional at the minimizer
  int iterations = 0;
  bool converged = true;
  SolveMethod method = SolveMethod::ClosedForm;
};

struct FrechetOptions {
  int max_iterations = 200;
  double tolerance = 1e-9;
  double step = 1.0;
};

// Symmetric pairwise distances of a point set.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(const PointSet& points, int threads = 1);
  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

// Minimizer of sum_k w_k d(Y_k, y)^2 over the space. Closed form for Euclidean, quantile
// grid, SPD-LC and SPD-LE; intrinsic gradient descent for Sphere, Hyperboloid and SPD-AI.
// The spheroid-induced metric has no solver here and falls back to the medoid.
FrechetSolveReport frechet_mean(const SampleView& sample, const FrechetOptions& options = {});
FrechetSolveReport frechet_mean(const WeightedSample& sample, const FrechetOptions& options = {});

// sum_k w_k d(Y_k, mean)^2 / sum_k w_k.
double frechet_variance(const SampleView& sample, std::span<const double> mean);
double frechet_variance(const WeightedSample& sample, const MetricPoint& mean);

// Weighted functional restricted to candidate points (indices into sample.points). Empty
// candidates means the points selected by the view. Ties go to the lowest candidate index.
FrechetSolveReport frechet_medoid(const SampleView& sample, std::span<const std::uint32_t> candidates = {},
                                  const DistanceMatrix* distances = nullptr);
FrechetSolveReport frechet_medoid(const WeightedSample& sample, std::span<const std::uint32_t> candidates = {},
                                  const DistanceMatrix* distances = nullptr);

// Normalized weighted functional at y.
double frechet_objective(const SampleView& sample, std::span<const double> y);

}  // namespace oobball
