#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oobball/dataset.hpp"
#include "oobball/rng.hpp"
#include "oobball/space.hpp"

namespace oobball {

enum class ScenarioKind {
  EuclideanLinear,        // Y = X1 - X2 + X3 + N(0, sigma^2)
  EuclideanMultivariate,  // Y = X B + N_q(0, AR(1) with coefficient rho)
  SphereGreatCircle,      // X ~ vMF((1,0), 1) on S^1, Theta = atan2(X2, X1), Y ~ vMF(m(Theta), kappa) on S^2
  HyperboloidMeridian,    // Theta ~ N(0, 0.25^2), Y ~ HvMF(m(Theta), kappa) on H^2
  SPDWishartInterp,       // X from scaled Beta(2,2), S ~ Wishart_2(d, M0(X) / c_{d,2})
  QuantileGridModel,      // quantile functions gamma + f(X) + (sigma + g(X)) Phi^{-1}
  SphereAnisotropic,      // tangent Gaussian noise on S^2 with east/north standard deviations
};

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::EuclideanLinear;
  std::size_t n = 100;
  double sigma = 0.8660254037844386;  // sqrt(3)/2
  std::size_t q = 1;                  // response dimension, EuclideanMultivariate
  double rho = 0.75;                  // AR(1) coefficient, EuclideanMultivariate
  double kappa = 50.0;
  double dof = 15.0;
  SpdMetric metric = SpdMetric::AI;
  std::size_t grid = 100;             // QuantileGridModel grid size
  double east_sd = 0.25;              // SphereAnisotropic
  double north_sd = 0.08;
  // Spheroid semi-axes for the SphereAnisotropic response metric (a = c = 1: plain sphere).
  double spheroid_a = 1.0;
  double spheroid_c = 1.0;

  void validate() const;
};

std::string scenario_name(ScenarioKind kind);
ScenarioKind parse_scenario_kind(std::string_view name);

class Scenario {
 public:
  explicit Scenario(ScenarioSpec spec);

  const ScenarioSpec& spec() const { return spec_; }
  const ProductSpace& predictor_space() const { return predictor_space_; }
  const SpaceDescriptor& response_space() const { return response_space_; }

  std::vector<double> draw_predictor(Rng& rng) const;
  std::vector<double> draw_response(std::span<const double> x, Rng& rng) const;
  // Conditional Frechet mean m(x) (for SPD under LC/LE this is the interpolation M0(x)).
  std::vector<double> regression(std::span<const double> x) const;
  // Predictor whose coordinates are the p-quantiles of their marginal laws.
  std::vector<double> predictor_quantile(double p) const;

  Dataset generate(std::size_t n, Rng& rng) const;
  Dataset generate(Rng& rng) const { return generate(spec_.n, rng); }

 private:
  ScenarioSpec spec_;
  ProductSpace predictor_space_;
  SpaceDescriptor response_space_;
  std::vector<double> normal_grid_;  // Phi^{-1}((i + 1/2) / m)
};

Dataset generate_scenario(const ScenarioSpec& spec, Rng& rng);

// Interpolated SPD regression function used by SPDWishartInterp.
std::vector<double> spd_interpolation(double x);

// Quantile of the angle of a vMF((1,0), kappa) draw on S^1 (von Mises distribution).
double von_mises_quantile(double p, double kappa);

}  // namespace oobball
