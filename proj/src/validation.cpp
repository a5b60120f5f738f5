#include "oobball/validation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "oobball/errors.hpp"
#include "oobball/frechet.hpp"
#include "oobball/metric.hpp"
#include "oobball/parallel.hpp"
#include "oobball/sampling.hpp"

namespace oobball {

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

void ValidationReport::add(std::string name, double value, double tolerance, bool passed) {
  checks.push_back({std::move(name), value, tolerance, passed});
}

void ValidationReport::add_at_most(std::string name, double value, double tolerance) {
  add(std::move(name), value, tolerance, value <= tolerance);
}

void print_report(std::ostream& out, const ValidationReport& report) {
  for (const auto& c : report.checks)
    out << (c.passed ? "PASS " : "FAIL ") << c.name << ": value " << std::setprecision(6) << c.value
        << " tolerance " << c.tolerance << '\n';
  out << (report.passed() ? "all checks passed" : "some checks failed") << '\n';
}

std::vector<double> random_point(const SpaceDescriptor& space, Rng& rng) {
  const std::size_t q = space.size();
  switch (space.kind()) {
    case SpaceKind::Euclidean: {
      std::vector<double> v(q);
      for (auto& x : v) x = 2.0 * rng.normal();
      return v;
    }
    case SpaceKind::Sphere:
      return sample_uniform_sphere(q + 1, rng);
    case SpaceKind::Spheroid:
      return sample_uniform_sphere(3, rng);
    case SpaceKind::Hyperboloid: {
      std::vector<double> base(q + 1, 0.0), v(q + 1, 0.0);
      base[0] = 1.0;
      for (std::size_t i = 1; i <= q; ++i) v[i] = rng.normal();
      return exp_map(space, base, v);
    }
    case SpaceKind::SPD:
      return spd::flatten(sample_wishart(static_cast<double>(q) + 3.0, spd::Matrix::Identity(q, q), rng));
    case SpaceKind::QuantileGrid: {
      std::vector<double> v(q);
      double level = rng.normal();
      for (auto& x : v) {
        x = level;
        level += rng.uniform() * 0.1;
      }
      return v;
    }
  }
  return {};
}

spd::Matrix mean_path(double t, const spd::Matrix& m_ai, const spd::Matrix& m_lc, const spd::Matrix& m_ext) {
  if (t <= 0.0) return (1.0 + t) * m_ai - t * m_ext;
  if (t <= 1.0) return (1.0 - t) * m_ai + t * m_lc;
  return (2.0 - t) * m_lc + (t - 1.0) * m_ext;
}

namespace {

// Squared AI distance from m to each draw, through the eigenvalues of m^{-1} S.
double ai_loss_sum(const spd::Matrix& m, const std::vector<spd::Matrix>& draws) {
  double total = 0.0;
  if (m.rows() == 2) {
    const double det_m = m.determinant();
    const spd::Matrix inv = m.inverse();
    for (const auto& s : draws) {
      const double tr = (inv * s).trace();
      const double det = s.determinant() / det_m;
      const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
      const double l1 = 0.5 * tr + disc;
      const double l2 = det / l1;  // avoids cancellation in the smaller root
      const double a = std::log(l1), b = std::log(l2);
      total += a * a + b * b;
    }
    return total;
  }
  for (const auto& s : draws) {
    Eigen::GeneralizedSelfAdjointEigenSolver<spd::Matrix> es(s, m, Eigen::EigenvaluesOnly);
    total += es.eigenvalues().array().log().square().sum();
  }
  return total;
}

double lc_loss_sum(const spd::Matrix& m, const std::vector<std::vector<double>>& embedded) {
  const auto e = spd::log_cholesky_embed(m);
  double total = 0.0;
  for (const auto& s : embedded)
    for (std::size_t i = 0; i < e.size(); ++i) total += (e[i] - s[i]) * (e[i] - s[i]);
  return total;
}

std::vector<double> near_geodesic(const SpaceDescriptor& space, const std::vector<double>& a,
                                  const std::vector<double>& c, double u) {
  if (space.kind() == SpaceKind::Spheroid) {
    std::vector<double> m(3);
    double norm = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      m[i] = (1.0 - u) * a[i] + u * c[i];
      norm += m[i] * m[i];
    }
    if (norm < 1e-12) return a;
    for (auto& x : m) x /= std::sqrt(norm);
    return m;
  }
  try {
    auto v = log_map(space, a, c);
    for (auto& x : v) x *= u;
    return exp_map(space, a, v);
  } catch (const NonUniqueGeodesic&) {
    return a;
  }
}

}  // namespace

MeansResult validate_frechet_means(const MeansConfig& config) {
  if (config.grid < 2) throw InvalidArgument("the t grid needs at least two points");
  if (config.draws < 1) throw InvalidArgument("needs at least one Wishart draw");
  const std::size_t q = config.q;
  const spd::Matrix sigma = config.sigma.size() == 0 ? spd::Matrix::Identity(q, q) : config.sigma;
  if (static_cast<std::size_t>(sigma.rows()) != q) throw InvalidArgument("scale matrix does not match q");

  Rng rng(config.seed);
  std::vector<spd::Matrix> draws;
  std::vector<std::vector<double>> embedded;
  draws.reserve(config.draws);
  embedded.reserve(config.draws);
  for (std::size_t k = 0; k < config.draws; ++k) {
    draws.push_back(sample_wishart(config.dof, sigma, rng));
    embedded.push_back(spd::log_cholesky_embed(draws.back()));
  }

  const double scale = config.corrupt ? 1.25 : 1.0;
  const spd::Matrix m_ai = scale * wishart_ai_mean(config.dof, sigma);
  const spd::Matrix m_lc = scale * wishart_lc_mean(config.dof, sigma);
  const spd::Matrix m_ext = config.dof * sigma;

  MeansResult r;
  r.step = 3.0 / static_cast<double>(config.grid - 1);
  r.t.resize(config.grid);
  for (std::size_t i = 0; i < config.grid; ++i) r.t[i] = -1.0 + r.step * static_cast<double>(i);
  r.ai_loss.resize(config.grid);
  r.lc_loss.resize(config.grid);

  const double ai_ref = ai_loss_sum(m_ai, draws);
  const double lc_ref = lc_loss_sum(m_lc, embedded);
  parallel_for(config.grid, config.threads, [&](std::size_t i) {
    const spd::Matrix m = mean_path(r.t[i], m_ai, m_lc, m_ext);
    r.ai_loss[i] = (ai_loss_sum(m, draws) - ai_ref) / ai_ref;
    r.lc_loss[i] = (lc_loss_sum(m, embedded) - lc_ref) / lc_ref;
  });
  r.ai_argmin = static_cast<std::size_t>(std::min_element(r.ai_loss.begin(), r.ai_loss.end()) - r.ai_loss.begin());
  r.lc_argmin = static_cast<std::size_t>(std::min_element(r.lc_loss.begin(), r.lc_loss.end()) - r.lc_loss.begin());

  const double slack = 1e-12;
  r.report.add_at_most("AI loss at the AI mean", std::abs(ai_loss_sum(m_ai, draws) - ai_ref) / ai_ref, 1e-12);
  r.report.add_at_most("LC loss at the LC mean", std::abs(lc_loss_sum(m_lc, embedded) - lc_ref) / lc_ref, 1e-12);
  r.report.add_at_most("AI argmin |t - 0| (grid steps)", std::abs(r.t[r.ai_argmin]) / r.step, 1.0 + slack);
  r.report.add_at_most("LC argmin |t - 1| (grid steps)", std::abs(r.t[r.lc_argmin] - 1.0) / r.step, 1.0 + slack);
  return r;
}

ValidationReport validate_geometry(const GeometryConfig& config) {
  const std::vector<std::string> spaces{"euclidean:1", "euclidean:5", "sphere:2",      "hyperboloid:2",
                                        "spd:2:ai",    "spd:2:lc",    "spd:2:le",      "quantile:100",
                                        "spheroid:0.5:1", "spheroid:1:1"};
  ValidationReport report;
  const Rng root(config.seed);
  for (std::size_t s = 0; s < spaces.size(); ++s) {
    const SpaceDescriptor space = SpaceDescriptor::parse(spaces[s]);
    const double identity_tol = space.kind() == SpaceKind::Spheroid ? 1e-8 : 1e-10;
    std::vector<double> sym(config.triples), ident(config.triples), tri(config.triples), pos(config.triples);
    parallel_for(config.triples, config.threads, [&](std::size_t k) {
      Rng rng = root.child({s, k});
      const auto a = random_point(space, rng), c = random_point(space, rng);
      // Every other triple puts b on (or, for the spheroid, near) the geodesic from a to c,
      // where the inequality is tight.
      auto b = random_point(space, rng);
      if (k % 2 == 1) b = near_geodesic(space, a, c, rng.uniform());
      const double ab = distance(space, a, b), ba = distance(space, b, a);
      const double bc = distance(space, b, c), ac = distance(space, a, c);
      sym[k] = std::abs(ab - ba);
      ident[k] = distance(space, a, a);
      tri[k] = ac - ab - bc;
      pos[k] = ab;
    });
    report.add_at_most(spaces[s] + " symmetry max |d(a,b) - d(b,a)|", *std::max_element(sym.begin(), sym.end()), 1e-12);
    report.add_at_most(spaces[s] + " identity max d(a,a)", *std::max_element(ident.begin(), ident.end()), identity_tol);
    const double min_pos = *std::min_element(pos.begin(), pos.end());
    report.add(spaces[s] + " separation min d(a,b) over distinct points", min_pos, 0.0, min_pos > 0.0);
    report.add_at_most(spaces[s] + " triangle max d(a,c) - d(a,b) - d(b,c)", *std::max_element(tri.begin(), tri.end()),
                       1e-9);
  }

  {
    const SpaceDescriptor lc = SpaceDescriptor::spd(2, SpdMetric::LC);
    Rng rng = root.child(0x1C);
    double worst = 0.0;
    for (std::size_t k = 0; k < config.triples; ++k) {
      const auto a = random_point(lc, rng), b = random_point(lc, rng);
      const auto ea = spd::log_cholesky_embed(spd::to_matrix(a, 2)), eb = spd::log_cholesky_embed(spd::to_matrix(b, 2));
      double sq = 0.0;
      for (std::size_t i = 0; i < ea.size(); ++i) sq += (ea[i] - eb[i]) * (ea[i] - eb[i]);
      worst = std::max(worst, std::abs(distance(lc, a, b) - std::sqrt(sq)));
    }
    report.add_at_most("spd:2:lc isometry with the log-Cholesky embedding", worst, 1e-12);
  }
  {
    const SpaceDescriptor sph = SpaceDescriptor::spheroid(1.0, 1.0), s2 = SpaceDescriptor::sphere(2);
    std::vector<double> diff(config.triples);
    parallel_for(config.triples, config.threads, [&](std::size_t k) {
      Rng rng = root.child({0x5F, k});
      const auto a = random_point(s2, rng), b = random_point(s2, rng);
      diff[k] = std::abs(distance(sph, a, b) - distance(s2, a, b));
    });
    report.add_at_most("spheroid:1:1 agrees with sphere:2", *std::max_element(diff.begin(), diff.end()), 1e-6);
  }
  return report;
}

ValidationReport validate_hvmf(std::uint64_t seed, std::size_t draws) {
  ValidationReport report;
  boost::math::quadrature::exp_sinh<double> integrator;
  for (std::size_t d : {2u, 3u})
    for (double kappa : {1.0, 10.0, 50.0}) {
      // 1/c = |S^{d-1}| int_0^inf exp(-kappa cosh u) sinh^{d-1} u du; exp(-kappa) is factored out.
      const auto f = [&](double u) {
        const double exponent = kappa * (std::cosh(u) - 1.0);
        if (exponent > 700.0) return 0.0;
        return std::exp(-kappa * (std::cosh(u) - 1.0)) * std::pow(std::sinh(u), static_cast<double>(d - 1));
      };
      const double integral = integrator.integrate(f, 1e-14);
      const double sphere_area =
          2.0 * std::pow(std::numbers::pi, d / 2.0) / boost::math::tgamma(static_cast<double>(d) / 2.0);
      // c * (1/c) = 1 with both sides scaled by exp(kappa).
      const double product = hvmf_normalizing_constant(d, kappa) * std::exp(-kappa) * sphere_area * integral;
      report.add_at_most("HvMF constant d=" + std::to_string(d) + " kappa=" + format_real(kappa) + " relative error",
                         std::abs(product - 1.0), 1e-8);
    }

  const SpaceDescriptor h2 = SpaceDescriptor::hyperboloid(2);
  const std::vector<double> mu{std::cosh(0.5), std::sinh(0.5) * std::numbers::sqrt2 / 2.0,
                               std::sinh(0.5) * std::numbers::sqrt2 / 2.0};
  Rng rng(seed);
  PointSet points(h2);
  points.reserve(draws);
  for (std::size_t k = 0; k < draws; ++k) points.push_back(sample_hvmf(mu, 50.0, rng));
  const auto mean = frechet_mean(SampleView{&points});
  report.add_at_most("HvMF kappa=50 sample Frechet mean distance to mu", distance(h2, mean.minimizer.coords, mu), 0.02);
  return report;
}

}  // namespace oobball
