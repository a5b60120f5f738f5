#include "oobball/scenario.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/tools/roots.hpp>

#include "oobball/errors.hpp"
#include "oobball/metric.hpp"
#include "oobball/sampling.hpp"
#include "oobball/spd.hpp"

namespace oobball {

namespace {

constexpr double kPi = std::numbers::pi;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

double scaled_beta(Rng& rng) { return 2.0 * std::sqrt(5.0) * (rng.beta(2.0, 2.0) - 0.5); }

ProductSpace euclidean_features(std::size_t p) {
  return ProductSpace(std::vector<SpaceDescriptor>(p, SpaceDescriptor::euclidean(1)));
}

double standard_normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), p);
}

std::vector<double> sphere_point(double lat, double lon) {
  return {std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)};
}

}  // namespace

void ScenarioSpec::validate() const {
  if (n < 2) throw InvalidArgument("scenario sample size must be at least 2");
  switch (kind) {
    case ScenarioKind::EuclideanLinear:
      if (!(sigma >= 0.0)) throw InvalidArgument("sigma must be nonnegative");
      break;
    case ScenarioKind::EuclideanMultivariate:
      if (q < 1) throw InvalidArgument("q must be at least 1");
      if (!(std::abs(rho) < 1.0)) throw InvalidArgument("rho must lie in (-1, 1)");
      break;
    case ScenarioKind::SphereGreatCircle:
    case ScenarioKind::HyperboloidMeridian:
      if (!(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
      break;
    case ScenarioKind::SPDWishartInterp:
      if (!(dof >= 2.0)) throw InvalidArgument("Wishart degrees of freedom must be at least 2");
      break;
    case ScenarioKind::QuantileGridModel:
      if (grid < 1) throw InvalidArgument("grid size must be at least 1");
      break;
    case ScenarioKind::SphereAnisotropic:
      if (!(east_sd >= 0.0) || !(north_sd >= 0.0)) throw InvalidArgument("noise SDs must be nonnegative");
      if (!(spheroid_a > 0.0) || !(spheroid_c > 0.0)) throw InvalidArgument("semi-axes must be positive");
      break;
  }
}

std::string scenario_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::EuclideanLinear:
      return "euclidean_linear";
    case ScenarioKind::EuclideanMultivariate:
      return "euclidean_multivariate";
    case ScenarioKind::SphereGreatCircle:
      return "sphere_great_circle";
    case ScenarioKind::HyperboloidMeridian:
      return "hyperboloid_meridian";
    case ScenarioKind::SPDWishartInterp:
      return "spd_wishart";
    case ScenarioKind::QuantileGridModel:
      return "quantile_grid";
    case ScenarioKind::SphereAnisotropic:
      return "sphere_anisotropic";
  }
  return {};
}

ScenarioKind parse_scenario_kind(std::string_view name) {
  for (auto k : {ScenarioKind::EuclideanLinear, ScenarioKind::EuclideanMultivariate, ScenarioKind::SphereGreatCircle,
                 ScenarioKind::HyperboloidMeridian, ScenarioKind::SPDWishartInterp, ScenarioKind::QuantileGridModel,
                 ScenarioKind::SphereAnisotropic})
    if (scenario_name(k) == name) return k;
  throw ParseError("unknown scenario '" + std::string(name) + "'");
}

std::vector<double> spd_interpolation(double x) {
  static const spd::Matrix s1 = (spd::Matrix(2, 2) << 1.0, -0.6, -0.6, 0.5).finished();
  static const spd::Matrix s2 = spd::Matrix::Identity(2, 2);
  static const spd::Matrix s3 = (spd::Matrix(2, 2) << 0.5, 0.4, 0.4, 1.0).finished();
  const double c2 = std::cos(kPi * x) * std::cos(kPi * x);
  const double s2sq = std::sin(kPi * x) * std::sin(kPi * x);
  // Parity of floor(x + 1/2), taken literally for negative x as well.
  const auto k = static_cast<long long>(std::floor(x + 0.5));
  const bool even = ((k % 2) + 2) % 2 == 0;
  const spd::Matrix m = even ? spd::Matrix(c2 * s1 + s2sq * s2) : spd::Matrix(s2sq * s2 + c2 * s3);
  return spd::flatten(m);
}

double von_mises_quantile(double p, double kappa) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("quantile level must lie in (0, 1)");
  using boost::math::quadrature::gauss_kronrod;
  auto density = [kappa](double t) { return std::exp(kappa * (std::cos(t) - 1.0)); };
  const double total = gauss_kronrod<double, 61>::integrate(density, -kPi, kPi, 15, 1e-14);
  auto cdf_gap = [&](double theta) {
    return gauss_kronrod<double, 61>::integrate(density, -kPi, theta, 15, 1e-14) / total - p;
  };
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve(cdf_gap, -kPi, kPi, boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (r.first + r.second);
}

Scenario::Scenario(ScenarioSpec spec)
    : spec_(spec), predictor_space_(euclidean_features(1)), response_space_(SpaceDescriptor::euclidean(1)) {
  spec_.validate();
  switch (spec_.kind) {
    case ScenarioKind::EuclideanLinear:
      predictor_space_ = euclidean_features(3);
      break;
    case ScenarioKind::EuclideanMultivariate:
      predictor_space_ = euclidean_features(3);
      response_space_ = SpaceDescriptor::euclidean(spec_.q);
      break;
    case ScenarioKind::SphereGreatCircle:
      predictor_space_ = ProductSpace({SpaceDescriptor::sphere(1)});
      response_space_ = SpaceDescriptor::sphere(2);
      break;
    case ScenarioKind::HyperboloidMeridian:
      response_space_ = SpaceDescriptor::hyperboloid(2);
      break;
    case ScenarioKind::SPDWishartInterp:
      response_space_ = SpaceDescriptor::spd(2, spec_.metric);
      break;
    case ScenarioKind::QuantileGridModel:
      response_space_ = SpaceDescriptor::quantile_grid(spec_.grid);
      for (std::size_t i = 0; i < spec_.grid; ++i)
        normal_grid_.push_back(standard_normal_quantile((static_cast<double>(i) + 0.5) / static_cast<double>(spec_.grid)));
      break;
    case ScenarioKind::SphereAnisotropic:
      response_space_ = spec_.spheroid_a == spec_.spheroid_c && spec_.spheroid_a == 1.0
                            ? SpaceDescriptor::sphere(2)
                            : SpaceDescriptor::spheroid(spec_.spheroid_a, spec_.spheroid_c);
      break;
  }
}

std::vector<double> Scenario::draw_predictor(Rng& rng) const {
  switch (spec_.kind) {
    case ScenarioKind::EuclideanLinear:
    case ScenarioKind::EuclideanMultivariate: {
      std::vector<double> x(3);
      for (auto& v : x) v = scaled_beta(rng);
      return x;
    }
    case ScenarioKind::SphereGreatCircle:
      return sample_vmf(std::vector<double>{1.0, 0.0}, 1.0, rng);
    case ScenarioKind::HyperboloidMeridian:
      return {0.25 * rng.normal()};
    case ScenarioKind::SPDWishartInterp:
      return {scaled_beta(rng)};
    case ScenarioKind::QuantileGridModel:
      return {rng.uniform()};
    case ScenarioKind::SphereAnisotropic:
      return {2.0 * rng.uniform() - 1.0};
  }
  return {};
}

std::vector<double> Scenario::regression(std::span<const double> x) const {
  switch (spec_.kind) {
    case ScenarioKind::EuclideanLinear:
      return {x[0] - x[1] + x[2]};
    case ScenarioKind::EuclideanMultivariate: {
      std::vector<double> m(spec_.q, 0.0);
      for (std::size_t k = 0; k < spec_.q; ++k)
        for (std::size_t j = 0; j < 3; ++j)
          m[k] += x[j] * std::sqrt(static_cast<double>(j + 1)) *
                  std::sin(static_cast<double>(k + 1) * kPi / static_cast<double>(spec_.q + 1));
      return m;
    }
    case ScenarioKind::SphereGreatCircle: {
      const double theta = std::atan2(x[1], x[0]);
      return {std::cos(theta), std::sin(theta) * kInvSqrt2, std::sin(theta) * kInvSqrt2};
    }
    case ScenarioKind::HyperboloidMeridian:
      return {std::cosh(x[0]), std::sinh(x[0]) * kInvSqrt2, std::sinh(x[0]) * kInvSqrt2};
    case ScenarioKind::SPDWishartInterp:
      return spd_interpolation(x[0]);
    case ScenarioKind::QuantileGridModel: {
      std::vector<double> m(spec_.grid);
      for (std::size_t i = 0; i < spec_.grid; ++i) m[i] = 2.0 * x[0] + (1.0 + 0.5 * x[0]) * normal_grid_[i];
      return m;
    }
    case ScenarioKind::SphereAnisotropic:
      return sphere_point(0.3 * x[0], x[0]);
  }
  return {};
}

std::vector<double> Scenario::draw_response(std::span<const double> x, Rng& rng) const {
  switch (spec_.kind) {
    case ScenarioKind::EuclideanLinear:
      return {regression(x)[0] + spec_.sigma * rng.normal()};
    case ScenarioKind::EuclideanMultivariate: {
      auto m = regression(x);
      // AR(1) errors: e_1 ~ N(0,1), e_k = rho e_{k-1} + sqrt(1 - rho^2) z_k.
      double e = rng.normal();
      m[0] += e;
      for (std::size_t k = 1; k < spec_.q; ++k) {
        e = spec_.rho * e + std::sqrt(1.0 - spec_.rho * spec_.rho) * rng.normal();
        m[k] += e;
      }
      return m;
    }
    case ScenarioKind::SphereGreatCircle:
      return sample_vmf(regression(x), spec_.kappa, rng);
    case ScenarioKind::HyperboloidMeridian:
      return sample_hvmf(regression(x), spec_.kappa, rng);
    case ScenarioKind::SPDWishartInterp: {
      const auto m0 = spd::to_matrix(regression(x), 2);
      const double c = wishart_ai_constant(spec_.dof, 2);
      return spd::flatten(sample_wishart(spec_.dof, m0 / c, rng));
    }
    case ScenarioKind::QuantileGridModel: {
      const double gamma = 0.1 * rng.normal();
      const double sigma = rng.gamma(100.0, 0.01);
      std::vector<double> y(spec_.grid);
      for (std::size_t i = 0; i < spec_.grid; ++i) y[i] = gamma + 2.0 * x[0] + (sigma + 0.5 * x[0]) * normal_grid_[i];
      return y;
    }
    case ScenarioKind::SphereAnisotropic: {
      const double lat = 0.3 * x[0], lon = x[0];
      const double e1 = spec_.east_sd * rng.normal();
      const double e2 = spec_.north_sd * rng.normal();
      const std::vector<double> east{-std::sin(lon), std::cos(lon), 0.0};
      const std::vector<double> north{-std::sin(lat) * std::cos(lon), -std::sin(lat) * std::sin(lon), std::cos(lat)};
      std::vector<double> v(3);
      for (std::size_t i = 0; i < 3; ++i) v[i] = e1 * east[i] + e2 * north[i];
      return exp_map(SpaceDescriptor::sphere(2), sphere_point(lat, lon), v);
    }
  }
  return {};
}

std::vector<double> Scenario::predictor_quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("quantile level must lie in (0, 1)");
  const double beta_q = 2.0 * std::sqrt(5.0) * (boost::math::ibeta_inv(2.0, 2.0, p) - 0.5);
  switch (spec_.kind) {
    case ScenarioKind::EuclideanLinear:
    case ScenarioKind::EuclideanMultivariate:
      return {beta_q, beta_q, beta_q};
    case ScenarioKind::SphereGreatCircle: {
      const double theta = von_mises_quantile(p, 1.0);
      return {std::cos(theta), std::sin(theta)};
    }
    case ScenarioKind::HyperboloidMeridian:
      return {0.25 * standard_normal_quantile(p)};
    case ScenarioKind::SPDWishartInterp:
      return {beta_q};
    case ScenarioKind::QuantileGridModel:
      return {p};
    case ScenarioKind::SphereAnisotropic:
      return {2.0 * p - 1.0};
  }
  return {};
}

Dataset Scenario::generate(std::size_t n, Rng& rng) const {
  Dataset data(predictor_space_, response_space_);
  data.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = draw_predictor(rng);
    const auto y = draw_response(x, rng);
    data.add(x, y);
  }
  return data;
}

Dataset generate_scenario(const ScenarioSpec& spec, Rng& rng) { return Scenario(spec).generate(rng); }

}  // namespace oobball
