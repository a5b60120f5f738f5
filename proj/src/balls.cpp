#include "oobball/balls.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/tools/roots.hpp>

#include "oobball/errors.hpp"
#include "oobball/metric.hpp"
#include "oobball/parallel.hpp"
#include "oobball/sampling.hpp"
#include "oobball/spd.hpp"
#include "oobball/spheroid.hpp"
#include "oobball/stats.hpp"

namespace oobball {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

// Orthonormal pair spanning the tangent plane of S^2 at c.
std::array<std::array<double, 3>, 2> tangent_frame(const std::vector<double>& c) {
  std::array<double, 3> helper{0.0, 0.0, 0.0};
  std::size_t smallest = 0;
  for (std::size_t i = 1; i < 3; ++i)
    if (std::abs(c[i]) < std::abs(c[smallest])) smallest = i;
  helper[smallest] = 1.0;
  const double dot = c[0] * helper[0] + c[1] * helper[1] + c[2] * helper[2];
  std::array<double, 3> e1{helper[0] - dot * c[0], helper[1] - dot * c[1], helper[2] - dot * c[2]};
  const double n1 = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
  for (auto& v : e1) v /= n1;
  const std::array<double, 3> e2{c[1] * e1[2] - c[2] * e1[1], c[2] * e1[0] - c[0] * e1[2], c[0] * e1[1] - c[1] * e1[0]};
  return {e1, e2};
}

// Point at angle theta from c in direction phi of the frame.
std::vector<double> cap_point(const std::vector<double>& c, const std::array<std::array<double, 3>, 2>& f, double theta,
                              double phi) {
  const double ct = std::cos(theta), st = std::sin(theta), cp = std::cos(phi), sp = std::sin(phi);
  std::vector<double> p(3);
  for (std::size_t i = 0; i < 3; ++i) p[i] = ct * c[i] + st * (cp * f[0][i] + sp * f[1][i]);
  const double n = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
  for (auto& v : p) v /= n;
  return p;
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
}

}  // namespace

std::string ball_method_name(BallMethod method) {
  switch (method) {
    case BallMethod::OOB:
      return "oob";
    case BallMethod::SplitConformal:
      return "sc";
    case BallMethod::Population:
      return "population";
  }
  return {};
}

BallMethod parse_ball_method(std::string_view name) {
  for (auto m : {BallMethod::OOB, BallMethod::SplitConformal, BallMethod::Population})
    if (ball_method_name(m) == name) return m;
  throw ParseError("unknown ball method '" + std::string(name) + "' (expected oob, sc or population)");
}

bool PredictionBall::contains(std::span<const double> y) const {
  if (y.size() != center.coords.size()) throw DescriptorMismatch("point does not match the ball space " + center.space.to_string());
  if (std::isinf(radius)) return true;
  return within(center.space, center.coords, y, radius);
}

OobErrorSet compute_oob_errors(const ForestModel& model, int threads) {
  const std::size_t n = model.size();
  std::vector<double> err(n, -1.0);
  const PointSet& y = model.training().responses();
  parallel_for(n, threads, [&](std::size_t i) {
    try {
      err[i] = distance(y.space(), y[i], model.oob_predict(i).coords);
    } catch (const NoOobTrees&) {
      err[i] = -1.0;
    }
  });
  OobErrorSet out;
  for (std::size_t i = 0; i < n; ++i) {
    if (err[i] < 0.0) {
      out.dropped.push_back(i);
    } else {
      out.errors.push_back(err[i]);
      out.indices.push_back(i);
    }
  }
  if (out.errors.empty()) throw InvalidArgument("every observation is in-bag for all trees; no OOB errors");
  return out;
}

double empirical_quantile(std::span<const double> errors, double alpha) {
  check_alpha(alpha);
  if (errors.empty()) throw InvalidArgument("empty error set");
  return order_statistic(errors, ceil_rank(1.0 - alpha, errors.size()));
}

double empirical_quantile(const OobErrorSet& errors, double alpha) { return empirical_quantile(errors.errors, alpha); }

double conformal_quantile(std::span<const double> residuals, double alpha) {
  check_alpha(alpha);
  if (residuals.empty()) throw InvalidArgument("empty residual set");
  const std::size_t rank = ceil_rank(1.0 - alpha, residuals.size() + 1);
  if (rank > residuals.size()) return kInf;
  return order_statistic(residuals, rank);
}

PredictionBall oob_ball(const ForestModel& model, const OobErrorSet& errors, std::span<const double> x, double alpha) {
  return {model.predict(x), empirical_quantile(errors, alpha), BallMethod::OOB, alpha};
}

PredictionBall oob_ball(const ForestModel& model, std::span<const double> x, double alpha) {
  return oob_ball(model, compute_oob_errors(model), x, alpha);
}

PredictionBall doubly_oob_ball(const ForestModel& model, std::size_t i, double alpha, std::size_t min_trees) {
  check_alpha(alpha);
  const auto trees_i = model.oob_trees(i);
  if (trees_i.empty()) throw NoOobTrees(i);
  const PointSet& y = model.training().responses();
  std::vector<double> errors;
  for (std::size_t j = 0; j < model.size(); ++j) {
    if (j == i) continue;
    std::vector<std::uint32_t> both;
    for (auto b : trees_i)
      if (!model.trees()[b].in_bag(j)) both.push_back(b);
    if (both.size() < std::max<std::size_t>(min_trees, 1)) continue;
    const auto pred = model.predict_with(model.training().predictor(j), both, j);
    errors.push_back(distance(y.space(), y[j], pred.coords));
  }
  if (errors.empty()) throw InvalidArgument("no doubly out-of-bag errors available");
  return {model.oob_predict(i), empirical_quantile(errors, alpha), BallMethod::OOB, alpha};
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_halves(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t k = n; k > 1; --k) std::swap(order[k - 1], order[rng.below(k)]);
  std::vector<std::size_t> first(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n / 2));
  std::vector<std::size_t> second(order.begin() + static_cast<std::ptrdiff_t>(n / 2), order.end());
  std::sort(first.begin(), first.end());
  std::sort(second.begin(), second.end());
  return {first, second};
}

std::vector<double> calibration_residuals(const ForestModel& model, const Dataset& calibration) {
  if (!(calibration.predictor_space() == model.predictor_space()) ||
      !(calibration.response_space() == model.response_space()))
    throw DescriptorMismatch("calibration data does not match the model spaces");
  std::vector<double> r(calibration.size());
  const PointSet& y = calibration.responses();
  for (std::size_t i = 0; i < calibration.size(); ++i)
    r[i] = distance(y.space(), y[i], model.predict(calibration.predictor(i)).coords);
  return r;
}

SplitConformalModel split_conformal_fit(const Dataset& data, Flavor flavor, const ForestParams& params, Rng& rng) {
  if (data.size() < 4) throw InvalidArgument("split-conformal balls need at least four observations");
  const auto [train, calib] = split_halves(data.size(), rng);
  ForestModel model = fit_forest(data.subset(train), flavor, params);
  auto residuals = calibration_residuals(model, data.subset(calib));
  return {std::move(model), std::move(residuals)};
}

PredictionBall split_conformal_ball(const SplitConformalModel& sc, std::span<const double> x, double alpha) {
  return {sc.model.predict(x), conformal_quantile(sc.residuals, alpha), BallMethod::SplitConformal, alpha};
}

MetricPoint scenario_conditional_mean(const Scenario& scenario, std::span<const double> x, Rng& rng,
                                      std::size_t draws) {
  const SpaceDescriptor& space = scenario.response_space();
  const auto m = scenario.regression(x);
  if (space.kind() == SpaceKind::SPD) {
    const ScenarioSpec& spec = scenario.spec();
    const spd::Matrix sigma = spd::to_matrix(m, 2) / wishart_ai_constant(spec.dof, 2);
    switch (space.spd_metric()) {
      case SpdMetric::AI:
        return {space, m};
      case SpdMetric::LC:
        return {space, spd::flatten(wishart_lc_mean(spec.dof, sigma))};
      case SpdMetric::LE: {
        spd::Matrix acc = spd::Matrix::Zero(2, 2);
        for (std::size_t k = 0; k < draws; ++k) acc += spd::log(sample_wishart(spec.dof, sigma, rng));
        acc /= static_cast<double>(draws);
        return {space, spd::flatten(spd::sym_exp(0.5 * (acc + acc.transpose())))};
      }
    }
  }
  return {space, m};
}

PredictionBall population_ball(const Scenario& scenario, std::span<const double> x, double alpha, Rng& rng,
                               std::size_t draws) {
  check_alpha(alpha);
  const ScenarioSpec& spec = scenario.spec();
  if (x.size() != scenario.predictor_space().coordinate_count())
    throw DescriptorMismatch("x does not match the scenario predictor space");
  PredictionBall ball;
  ball.method = BallMethod::Population;
  ball.alpha = alpha;
  if (spec.kind == ScenarioKind::EuclideanLinear) {
    ball.center = {scenario.response_space(), scenario.regression(x)};
    ball.radius = spec.sigma * boost::math::quantile(boost::math::normal_distribution<double>(), 1.0 - alpha / 2.0);
    return ball;
  }
  if (spec.kind == ScenarioKind::EuclideanMultivariate && spec.rho == 0.0) {
    ball.center = {scenario.response_space(), scenario.regression(x)};
    const boost::math::chi_squared_distribution<double> chi2(static_cast<double>(spec.q));
    ball.radius = std::sqrt(boost::math::quantile(chi2, 1.0 - alpha));
    return ball;
  }
  if (draws == 0) throw InvalidArgument("Monte Carlo population ball needs draws");
  ball.center = scenario_conditional_mean(scenario, x, rng);
  std::vector<double> r(draws);
  const SpaceDescriptor& space = scenario.response_space();
  for (auto& v : r) v = distance(space, scenario.draw_response(x, rng), ball.center.coords);
  ball.radius = empirical_quantile(r, alpha);
  return ball;
}

VolumeEstimate ball_volume(const PredictionBall& ball, Rng& rng, std::size_t draws) {
  const SpaceDescriptor& space = ball.center.space;
  const double r = ball.radius;
  switch (space.kind()) {
    case SpaceKind::Euclidean: {
      const double q = static_cast<double>(space.size());
      if (std::isinf(r)) return {kInf, 0.0};
      return {std::pow(kPi, q / 2.0) / std::tgamma(q / 2.0 + 1.0) * std::pow(r, q), 0.0};
    }
    case SpaceKind::Sphere:
      if (space.size() != 2) break;
      return {2.0 * kPi * (1.0 - std::cos(std::min(r, kPi))), 0.0};
    case SpaceKind::Spheroid: {
      if (std::isinf(r)) return {4.0 * kPi, 0.0};
      if (draws == 0) throw InvalidArgument("Monte Carlo area needs draws");
      // The region lies inside the cap of angular radius r / min(a, c); sample that cap uniformly.
      const double outer = std::min(kPi, r / std::min(space.semi_axis_a(), space.semi_axis_c()));
      const double cap = 2.0 * kPi * (1.0 - std::cos(outer));
      const auto frame = tangent_frame(ball.center.coords);
      std::size_t hits = 0;
      for (std::size_t k = 0; k < draws; ++k) {
        const double z = 1.0 - rng.uniform() * (1.0 - std::cos(outer));
        const double phi = 2.0 * kPi * rng.uniform();
        if (ball.contains(cap_point(ball.center.coords, frame, std::acos(std::clamp(z, -1.0, 1.0)), phi))) ++hits;
      }
      const double p = static_cast<double>(hits) / static_cast<double>(draws);
      return {cap * p, cap * std::sqrt(p * (1.0 - p) / static_cast<double>(draws))};
    }
    default:
      break;
  }
  throw InvalidArgument("ball volume is not defined for " + space.to_string());
}

double spheroid_ball_area(const PredictionBall& ball, std::size_t directions) {
  const SpaceDescriptor& space = ball.center.space;
  if (space.kind() != SpaceKind::Spheroid) throw InvalidArgument("polar area needs a spheroid-induced ball");
  if (directions < 4) throw InvalidArgument("polar area needs at least four directions");
  const double r = ball.radius;
  if (std::isinf(r)) return 4.0 * kPi;
  if (r <= 0.0) return 0.0;
  const double a = space.semi_axis_a(), c = space.semi_axis_c();
  const auto& center = ball.center.coords;
  const auto frame = tangent_frame(center);
  const double lo = std::min(kPi, r / std::max(a, c)), hi = std::min(kPi, r / std::min(a, c));
  double sum = 0.0;
  for (std::size_t k = 0; k < directions; ++k) {
    const double phi = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(directions);
    auto gap = [&](double t) { return induced_sphere_distance(center, cap_point(center, frame, t, phi), a, c) - r; };
    double rho = hi;
    const double g_lo = gap(lo), g_hi = gap(hi);
    if (g_lo >= 0.0) {
      rho = lo;
    } else if (g_hi > 0.0) {
      std::uintmax_t iters = 100;
      const auto root =
          boost::math::tools::toms748_solve(gap, lo, hi, g_lo, g_hi, boost::math::tools::eps_tolerance<double>(40), iters);
      rho = 0.5 * (root.first + root.second);
    }
    sum += 1.0 - std::cos(rho);
  }
  return 2.0 * kPi * sum / static_cast<double>(directions);
}

std::vector<std::vector<double>> boundary_sample(const PredictionBall& ball, std::size_t count, Rng& rng) {
  const SpaceDescriptor& space = ball.center.space;
  const auto& c = ball.center.coords;
  if (std::isinf(ball.radius)) throw InvalidArgument("the ball is the whole space and has no boundary");
  std::vector<std::vector<double>> out;
  out.reserve(count);
  if (space.kind() == SpaceKind::Spheroid) {
    // Walk along a random great circle until the induced distance reaches the radius.
    const SpaceDescriptor s2 = SpaceDescriptor::sphere(2);
    const double a = space.semi_axis_a(), cc = space.semi_axis_c();
    while (out.size() < count) {
      std::vector<double> v(3);
      for (auto& e : v) e = rng.normal();
      v = project_tangent(s2, c, v);
      const double nv = tangent_norm(s2, c, v);
      if (!(nv > 0.0)) continue;
      for (auto& e : v) e /= nv;
      auto at = [&](double t) {
        std::vector<double> w(v);
        for (auto& e : w) e *= t;
        return exp_map(s2, c, w);
      };
      auto gap = [&](double t) { return induced_sphere_distance(c, at(t), a, cc) - ball.radius; };
      if (ball.radius <= 0.0) {
        out.push_back(c);
        continue;
      }
      if (gap(kPi) < 0.0) throw InvalidArgument("radius exceeds the spheroid diameter along a direction");
      std::uintmax_t iters = 100;
      auto root = boost::math::tools::toms748_solve(gap, 0.0, kPi, -ball.radius, gap(kPi),
                                                    boost::math::tools::eps_tolerance<double>(50), iters);
      out.push_back(at(0.5 * (root.first + root.second)));
    }
    return out;
  }
  if (space.kind() == SpaceKind::Sphere && ball.radius > kPi)
    throw InvalidArgument("radius exceeds the sphere diameter");
  const std::size_t t = tangent_size(space);
  while (out.size() < count) {
    std::vector<double> v(t);
    for (auto& e : v) e = rng.normal();
    v = project_tangent(space, c, v);
    const double nv = tangent_norm(space, c, v);
    if (!(nv > 0.0)) continue;
    for (auto& e : v) e *= ball.radius / nv;
    out.push_back(exp_map(space, c, v));
  }
  return out;
}

}  // namespace oobball
