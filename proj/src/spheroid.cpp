#include "oobball/spheroid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include "oobball/errors.hpp"

namespace oobball {

namespace {

constexpr double kPi = std::numbers::pi;

double sphere_angle(std::span<const double> x, std::span<const double> y) {
  double dot = 0.0, diff = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    dot += x[i] * y[i];
    diff += (x[i] - y[i]) * (x[i] - y[i]);
    sum += (x[i] + y[i]) * (x[i] + y[i]);
  }
  if (dot >= 0.0) return 2.0 * std::asin(std::min(1.0, std::sqrt(diff) / 2.0));
  return kPi - 2.0 * std::asin(std::min(1.0, std::sqrt(sum) / 2.0));
}

// Reduced latitude expressed through (sin, cos) pairs to keep the poles exact.
struct Latitude {
  double s;
  double c;
};

class Solver {
 public:
  Solver(double a, double c) : a_(a), c_(c), f_((a - c) / a), ep2_((a * a - c * c) / (c * c)) {}

  double solve(Latitude p1, Latitude p2, double lambda12) const {
    std::vector<double> lengths;
    scan(p1, p2, lambda12, lengths);
    if (lambda12 > 1e-15) scan(p1, p2, 2.0 * kPi - lambda12, lengths);
    // beta2 = -beta1: the auxiliary points are antipodal and a one-parameter family of
    // geodesics leaves through w = pi.
    if (std::abs(p1.s + p2.s) < 1e-12 && std::abs(p1.c - p2.c) < 1e-12) antipodal_family(p1, lambda12, lengths);
    if (lengths.empty()) throw NumericalFailure("spheroid geodesic solver found no solution");
    return *std::min_element(lengths.begin(), lengths.end());
  }

 private:
  struct Eval {
    double lambda;
    double length;
  };

  // Integrates E = int sqrt(1 + k2 sin^2) and J = int (2-f)/(1 + (1-f) sqrt(...)) over [lo, hi].
  void integrals(double k2, double lo, double hi, double& e_int, double& j_int) const {
    using Rule = boost::math::quadrature::gauss<double, 16>;
    const auto& x = Rule::abscissa();
    const auto& w = Rule::weights();
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / (kPi / 8.0))));
    const double h = (hi - lo) / panels;
    e_int = 0.0;
    j_int = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double mid = lo + (p + 0.5) * h;
      const double half = 0.5 * h;
      for (std::size_t i = 0; i < x.size(); ++i) {
        for (double sign : {-1.0, 1.0}) {
          const double t = mid + sign * half * x[i];
          const double st = std::sin(t);
          const double r = std::sqrt(1.0 + k2 * st * st);
          e_int += half * w[i] * r;
          j_int += half * w[i] * (2.0 - f_) / (1.0 + (1.0 - f_) * r);
        }
      }
    }
  }

  Eval evaluate(Latitude p1, Latitude p2, double omega) const {
    const double so = std::sin(omega), co = std::cos(omega);
    const double num = p2.c * so;
    const double den = p1.c * p2.s - p1.s * p2.c * co;
    double alpha1 = std::atan2(num, den);
    const double sa1 = std::sin(alpha1), ca1 = std::cos(alpha1);
    const double sa0 = sa1 * p1.c;
    const double ca0 = std::hypot(ca1, sa1 * p1.s);
    const double sigma1 = std::atan2(p1.s, ca1 * p1.c);
    const double sigma12 = std::atan2(std::hypot(num, den), p1.s * p2.s + p1.c * p2.c * co);
    double e_int = 0.0, j_int = 0.0;
    integrals(ep2_ * ca0 * ca0, sigma1, sigma1 + sigma12, e_int, j_int);
    return {omega - f_ * sa0 * j_int, c_ * e_int};
  }

  void scan(Latitude p1, Latitude p2, double target, std::vector<double>& lengths) const {
    constexpr int kSteps = 24;
    std::vector<double> omegas(kSteps + 1), g(kSteps + 1), len(kSteps + 1);
    for (int k = 0; k <= kSteps; ++k) {
      const double u = 1.0 - static_cast<double>(kSteps - k) / kSteps;
      // Denser near w = pi, where lambda(w) varies fastest.
      omegas[k] = k == kSteps ? kPi : kPi * (1.0 - (1.0 - u) * (1.0 - u));
      const Eval e = evaluate(p1, p2, omegas[k]);
      g[k] = e.lambda - target;
      len[k] = e.length;
    }
    for (int k = 0; k <= kSteps; ++k)
      if (std::abs(g[k]) < 1e-13) lengths.push_back(len[k]);
    for (int k = 0; k < kSteps; ++k) {
      if (!((g[k] < 0.0 && g[k + 1] > 0.0) || (g[k] > 0.0 && g[k + 1] < 0.0))) continue;
      auto fn = [&](double w) { return evaluate(p1, p2, w).lambda - target; };
      std::uintmax_t iters = 100;
      auto bracket = boost::math::tools::toms748_solve(fn, omegas[k], omegas[k + 1], g[k], g[k + 1],
                                                       boost::math::tools::eps_tolerance<double>(52), iters);
      const double w = 0.5 * (bracket.first + bracket.second);
      const Eval e = evaluate(p1, p2, w);
      if (std::abs(e.lambda - target) < 1e-9) lengths.push_back(e.length);
    }
  }

  void antipodal_family(Latitude p1, double target, std::vector<double>& lengths) const {
    auto eval = [&](double alpha1) {
      const double sa0 = std::sin(alpha1) * p1.c;
      const double ca0 = std::sqrt(std::max(0.0, 1.0 - sa0 * sa0));
      double e_int = 0.0, j_int = 0.0;
      integrals(ep2_ * ca0 * ca0, 0.0, kPi, e_int, j_int);
      return Eval{kPi - f_ * sa0 * j_int, c_ * e_int};
    };
    const Eval lo = eval(0.0), hi = eval(kPi / 2.0);
    const double g0 = lo.lambda - target, g1 = hi.lambda - target;
    if (std::abs(g0) < 1e-13) lengths.push_back(lo.length);
    if (std::abs(g1) < 1e-13) lengths.push_back(hi.length);
    if (!((g0 < 0.0 && g1 > 0.0) || (g0 > 0.0 && g1 < 0.0))) return;
    std::uintmax_t iters = 100;
    auto bracket = boost::math::tools::toms748_solve([&](double al) { return eval(al).lambda - target; }, 0.0,
                                                     kPi / 2.0, g0, g1,
                                                     boost::math::tools::eps_tolerance<double>(52), iters);
    const Eval e = eval(0.5 * (bracket.first + bracket.second));
    if (std::abs(e.lambda - target) < 1e-9) lengths.push_back(e.length);
  }

  double a_, c_, f_, ep2_;
};

void check_axes(double a, double c) {
  if (!(a > 0.0) || !(c > 0.0)) throw InvalidArgument("spheroid semi-axes must be positive");
}

}  // namespace

std::array<double, 3> spheroid_map(std::span<const double> x, double a, double c) {
  check_axes(a, c);
  return {a * x[0], a * x[1], c * x[2]};
}

std::array<double, 3> spheroid_unmap(std::span<const double> p, double a, double c) {
  check_axes(a, c);
  return {p[0] / a, p[1] / a, p[2] / c};
}

double induced_sphere_distance(std::span<const double> x, std::span<const double> y, double a, double c) {
  check_axes(a, c);
  if (x[0] == y[0] && x[1] == y[1] && x[2] == y[2]) return 0.0;
  if (a == c) return a * sphere_angle(x, y);
  // Canonical order makes the result exactly symmetric.
  bool swap = std::make_tuple(x[2], x[0], x[1]) > std::make_tuple(y[2], y[0], y[1]);
  std::span<const double> u = swap ? y : x, v = swap ? x : y;
  auto latitude = [](std::span<const double> w) {
    const double h = std::hypot(w[0], w[1]);
    const double n = std::hypot(h, w[2]);
    return Latitude{w[2] / n, h / n};
  };
  const Latitude p1 = latitude(u), p2 = latitude(v);
  const double l1 = std::atan2(u[1], u[0]), l2 = std::atan2(v[1], v[0]);
  double lambda12 = std::abs(std::remainder(l2 - l1, 2.0 * kPi));
  if (p1.c == 0.0 || p2.c == 0.0) lambda12 = 0.0;  // a pole: longitude is irrelevant
  return Solver(a, c).solve(p1, p2, lambda12);
}

double spheroid_geodesic_distance(std::span<const double> p, std::span<const double> q, double a, double c) {
  check_axes(a, c);
  for (auto pt : {p, q}) {
    const double r = (pt[0] / a) * (pt[0] / a) + (pt[1] / a) * (pt[1] / a) + (pt[2] / c) * (pt[2] / c);
    if (std::abs(r - 1.0) > 1e-8) throw InvalidPoint("point is not on the spheroid");
  }
  auto normalize = [&](std::span<const double> pt) {
    std::array<double, 3> u = spheroid_unmap(pt, a, c);
    const double n = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    for (double& v : u) v /= n;
    return u;
  };
  const auto u = normalize(p), v = normalize(q);
  return induced_sphere_distance(u, v, a, c);
}

bool induced_sphere_within(std::span<const double> x, std::span<const double> y, double a, double c, double radius) {
  const double theta = sphere_angle(x, y);
  const double lo = std::min(a, c) * theta, hi = std::max(a, c) * theta;
  // Margins absorb the solver's rounding so the shortcut agrees with the full computation.
  if (hi < radius * (1.0 - 1e-12)) return true;
  if (lo > radius * (1.0 + 1e-12)) return false;
  return induced_sphere_distance(x, y, a, c) < radius;
}

}  // namespace oobball
