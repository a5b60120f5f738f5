#include "oobball/sampling.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/minima.hpp>

#include "oobball/errors.hpp"

namespace oobball {

namespace {

void householder_from_e1(std::span<const double> mu, std::vector<double>& y) {
  // H = I - 2 u u^T / |u|^2 with u = e1 - mu maps e1 to mu.
  std::vector<double> u(mu.begin(), mu.end());
  for (auto& v : u) v = -v;
  u[0] += 1.0;
  double uu = 0.0, uy = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    uu += u[i] * u[i];
    uy += u[i] * y[i];
  }
  if (uu < 1e-300) return;
  const double c = 2.0 * uy / uu;
  for (std::size_t i = 0; i < u.size(); ++i) y[i] -= c * u[i];
}

void normalize(std::vector<double>& v) {
  double n = 0.0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  for (auto& x : v) x /= n;
}

// Draws t = cosh(u) - 1 with density proportional to (t (t + 2))^m exp(-kappa t), m = (d-2)/2.
double hvmf_radial(std::size_t d, double kappa, Rng& rng) {
  const double m = (static_cast<double>(d) - 2.0) / 2.0;
  if (m == 0.0) return rng.gamma(1.0, 1.0 / kappa);
  if (m < 0.0) {
    // (t + 2)^m <= 2^m: Gamma(m + 1, kappa) proposal.
    for (;;) {
      const double t = rng.gamma(m + 1.0, 1.0 / kappa);
      if (rng.uniform() <= std::pow((t + 2.0) / 2.0, m)) return t;
    }
  }
  // Gamma(m + 1, lambda) proposal with lambda < kappa; the remaining factor
  // h(t) = (t + 2)^m exp(-(kappa - lambda) t) is bounded. lambda minimizes the rejection constant.
  auto log_bound = [&](double lambda) {
    const double gap = kappa - lambda;
    const double t_star = std::max(0.0, m / gap - 2.0);
    return m * std::log(t_star + 2.0) - gap * t_star;
  };
  auto cost = [&](double lambda) { return log_bound(lambda) - (m + 1.0) * std::log(lambda); };
  const double lambda = boost::math::tools::brent_find_minima(cost, 1e-6 * kappa, kappa * (1.0 - 1e-9), 40).first;
  const double bound = log_bound(lambda);
  for (;;) {
    const double t = rng.gamma(m + 1.0, 1.0 / lambda);
    const double log_h = m * std::log(t + 2.0) - (kappa - lambda) * t;
    if (std::log(rng.uniform()) <= log_h - bound) return t;
  }
}

}  // namespace

std::vector<double> sample_uniform_sphere(std::size_t ambient, Rng& rng) {
  std::vector<double> v(ambient);
  double n = 0.0;
  do {
    n = 0.0;
    for (auto& x : v) {
      x = rng.normal();
      n += x * x;
    }
  } while (n == 0.0);
  normalize(v);
  return v;
}

std::vector<double> sample_vmf(std::span<const double> mu, double kappa, Rng& rng) {
  if (!(kappa >= 0.0)) throw InvalidArgument("vMF concentration must be nonnegative");
  const std::size_t p = mu.size();
  if (p < 2) throw InvalidArgument("vMF needs an ambient dimension of at least 2");
  if (kappa == 0.0) return sample_uniform_sphere(p, rng);
  const double pm1 = static_cast<double>(p - 1);
  const double b = pm1 / (2.0 * kappa + std::sqrt(4.0 * kappa * kappa + pm1 * pm1));
  const double x0 = (1.0 - b) / (1.0 + b);
  const double c = kappa * x0 + pm1 * std::log(1.0 - x0 * x0);
  double w = 0.0;
  for (;;) {
    const double z = rng.beta(pm1 / 2.0, pm1 / 2.0);
    w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
    const double u = rng.uniform();
    if (kappa * w + pm1 * std::log(1.0 - x0 * w) - c >= std::log(u)) break;
  }
  const auto v = sample_uniform_sphere(p - 1, rng);
  std::vector<double> y(p);
  const double s = std::sqrt(std::max(0.0, 1.0 - w * w));
  y[0] = w;
  for (std::size_t i = 1; i < p; ++i) y[i] = s * v[i - 1];
  householder_from_e1(mu, y);
  normalize(y);
  return y;
}

MetricPoint sample_vmf(const MetricPoint& mu, double kappa, Rng& rng) {
  if (mu.space.kind() != SpaceKind::Sphere) throw DescriptorMismatch("vMF location must be a sphere point");
  return {mu.space, sample_vmf(mu.coords, kappa, rng)};
}

std::vector<double> hyperbolic_transport(std::span<const double> mu, std::span<const double> x) {
  // A = [[mu1, ms^T], [ms, I + ms ms^T / (1 + mu1)]].
  const std::size_t n = mu.size();
  double ms_xs = 0.0;
  for (std::size_t i = 1; i < n; ++i) ms_xs += mu[i] * x[i];
  std::vector<double> y(n);
  const double coef = x[0] + ms_xs / (1.0 + mu[0]);
  double tail = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    y[i] = x[i] + mu[i] * coef;
    tail += y[i] * y[i];
  }
  y[0] = std::sqrt(1.0 + tail);
  return y;
}

std::vector<double> sample_hvmf(std::span<const double> mu, double kappa, Rng& rng) {
  if (!(kappa > 0.0)) throw InvalidArgument("HvMF concentration must be positive");
  const std::size_t d = mu.size() - 1;
  if (d < 1) throw InvalidArgument("HvMF needs a hyperboloid of dimension at least 1");
  const double t = hvmf_radial(d, kappa, rng);
  const auto v = sample_uniform_sphere(d, rng);
  std::vector<double> x(d + 1);
  const double sh = std::sqrt(t * (t + 2.0));
  x[0] = 1.0 + t;
  for (std::size_t i = 0; i < d; ++i) x[i + 1] = sh * v[i];
  return hyperbolic_transport(mu, x);
}

MetricPoint sample_hvmf(const MetricPoint& mu, double kappa, Rng& rng) {
  if (mu.space.kind() != SpaceKind::Hyperboloid) throw DescriptorMismatch("HvMF location must be a hyperboloid point");
  return {mu.space, sample_hvmf(mu.coords, kappa, rng)};
}

double hvmf_normalizing_constant(std::size_t d, double kappa) {
  if (!(kappa > 0.0) || d < 1) throw InvalidArgument("HvMF constant needs d >= 1 and kappa > 0");
  const double nu = (static_cast<double>(d) - 1.0) / 2.0;
  const double log_k = std::log(boost::math::cyl_bessel_k(nu, kappa));
  return std::exp(nu * std::log(kappa) - nu * std::log(2.0 * std::numbers::pi) - std::log(2.0) - log_k);
}

spd::Matrix sample_wishart(double dof, const spd::Matrix& sigma, Rng& rng) {
  const auto q = static_cast<std::size_t>(sigma.rows());
  if (!(dof >= static_cast<double>(q))) throw InvalidArgument("Wishart degrees of freedom must be at least q");
  const spd::Matrix l = spd::cholesky(sigma);
  spd::Matrix a = spd::Matrix::Zero(q, q);
  for (std::size_t i = 0; i < q; ++i) {
    a(i, i) = std::sqrt(rng.chi_squared(dof - static_cast<double>(i)));
    for (std::size_t j = 0; j < i; ++j) a(i, j) = rng.normal();
  }
  const spd::Matrix la = l * a;
  spd::Matrix s = la * la.transpose();
  return 0.5 * (s + s.transpose());
}

double wishart_ai_constant(double dof, std::size_t q) {
  double total = 0.0;
  for (std::size_t i = 1; i <= q; ++i) total += boost::math::digamma((dof - static_cast<double>(i) + 1.0) / 2.0);
  return 2.0 * std::exp(total / static_cast<double>(q));
}

spd::Matrix wishart_ai_mean(double dof, const spd::Matrix& sigma) {
  return wishart_ai_constant(dof, static_cast<std::size_t>(sigma.rows())) * sigma;
}

spd::Matrix wishart_lc_mean(double dof, const spd::Matrix& sigma) {
  const spd::Matrix l = spd::cholesky(sigma);
  const auto q = l.rows();
  spd::Matrix t = spd::Matrix::Zero(q, q);
  for (Eigen::Index i = 0; i < q; ++i) {
    const double di = dof - static_cast<double>(i);  // d - i + 1 with 1-based i
    t(i, i) = l(i, i) * std::sqrt(2.0) * std::exp(0.5 * boost::math::digamma(di / 2.0));
    for (Eigen::Index j = 0; j < i; ++j) {
      const double dj = dof - static_cast<double>(j);
      t(i, j) = l(i, j) * std::sqrt(2.0) * boost::math::tgamma_ratio((dj + 1.0) / 2.0, dj / 2.0);
    }
  }
  return t * t.transpose();
}

}  // namespace oobball
