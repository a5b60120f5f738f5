#include "oobball/frechet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "oobball/errors.hpp"
#include "oobball/metric.hpp"
#include "oobball/parallel.hpp"
#include "oobball/spd.hpp"

namespace oobball {

namespace {

double total_weight(const SampleView& s) {
  if (s.points == nullptr || s.size() == 0) throw InvalidArgument("empty sample");
  if (!s.weights.empty() && s.weights.size() != s.size())
    throw InvalidArgument("weights and points have different lengths");
  double w = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double wk = s.weight(k);
    if (!(wk >= 0.0)) throw InvalidArgument("weights must be nonnegative");
    w += wk;
  }
  if (!(w > 0.0)) throw InvalidArgument("all weights are zero");
  return w;
}

FrechetSolveReport closed_form(const SampleView& s, double total) {
  const SpaceDescriptor& space = s.points->space();
  FrechetSolveReport r;
  r.method = SolveMethod::ClosedForm;
  r.minimizer.space = space;
  switch (space.kind()) {
    case SpaceKind::Euclidean:
    case SpaceKind::QuantileGrid: {
      std::vector<double> m(space.coordinate_count(), 0.0);
      for (std::size_t k = 0; k < s.size(); ++k) {
        const double w = s.weight(k);
        if (w == 0.0) continue;
        auto y = s.point(k);
        for (std::size_t i = 0; i < m.size(); ++i) m[i] += w * y[i];
      }
      for (auto& v : m) v /= total;
      r.minimizer.coords = std::move(m);
      break;
    }
    case SpaceKind::SPD: {
      const std::size_t q = space.size();
      if (space.spd_metric() == SpdMetric::LC) {
        std::vector<double> m(q * (q + 1) / 2, 0.0);
        for (std::size_t k = 0; k < s.size(); ++k) {
          const double w = s.weight(k);
          if (w == 0.0) continue;
          const auto e = spd::log_cholesky_embed(spd::to_matrix(s.point(k), q));
          for (std::size_t i = 0; i < m.size(); ++i) m[i] += w * e[i];
        }
        for (auto& v : m) v /= total;
        r.minimizer.coords = spd::flatten(spd::log_cholesky_unembed(m, q));
      } else {
        spd::Matrix m = spd::Matrix::Zero(q, q);
        for (std::size_t k = 0; k < s.size(); ++k) {
          const double w = s.weight(k);
          if (w == 0.0) continue;
          m += w * spd::log(spd::to_matrix(s.point(k), q));
        }
        m /= total;
        spd::Matrix e = spd::sym_exp(0.5 * (m + m.transpose()));
        r.minimizer.coords = spd::flatten(0.5 * (e + e.transpose()));
      }
      break;
    }
    default:
      throw InvalidArgument("no closed-form mean for " + space.to_string());
  }
  r.objective = frechet_objective(s, r.minimizer.coords);
  return r;
}

// Indices of at most `count` sample entries with positive weight, evenly strided.
std::vector<std::size_t> strided_candidates(const SampleView& s, std::size_t count) {
  std::vector<std::size_t> positive;
  for (std::size_t k = 0; k < s.size(); ++k)
    if (s.weight(k) > 0.0) positive.push_back(k);
  if (positive.size() <= count) return positive;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(positive[i * positive.size() / count]);
  return out;
}

// Karcher iteration on the sphere or hyperboloid with ambient-coordinate tangents.
class AmbientDescent {
 public:
  AmbientDescent(const SampleView& s, double total, const FrechetOptions& opt)
      : s_(s), space_(s.points->space()), total_(total), opt_(opt), n_(space_.coordinate_count()) {}

  FrechetSolveReport run() {
    std::vector<double> x = initial_point();
    std::vector<double> g(n_), x_new(n_), g_new(n_);
    double f = evaluate(x, g);
    FrechetSolveReport r;
    r.method = SolveMethod::GradientDescent;
    r.converged = false;
    int it = 0;
    for (; it < opt_.max_iterations; ++it) {
      if (norm(g) < opt_.tolerance) {
        r.converged = true;
        break;
      }
      double step = opt_.step;
      bool improved = false;
      for (int halving = 0; halving < 40; ++halving) {
        x_new = exp_map(space_, x, scaled(g, step));
        const double f_new = evaluate(x_new, g_new);
        if (f_new <= f * (1.0 + 1e-15)) {
          x.swap(x_new);
          g.swap(g_new);
          f = f_new;
          improved = true;
          break;
        }
        step *= 0.5;
      }
      if (!improved) break;  // stalled at the rounding floor above the tolerance
    }
    if (!r.converged && norm(g) < opt_.tolerance) r.converged = true;
    r.iterations = it;
    r.minimizer = {space_, x};
    r.objective = f;
    return r;
  }

 private:
  double norm(const std::vector<double>& v) const { return tangent_norm(space_, {}, v); }

  std::vector<double> scaled(const std::vector<double>& v, double t) const {
    std::vector<double> out(v);
    for (auto& e : out) e *= t;
    return out;
  }

  // Objective and mean log vector at x.
  double evaluate(const std::vector<double>& x, std::vector<double>& g) const {
    std::fill(g.begin(), g.end(), 0.0);
    double f = 0.0;
    const bool sphere = space_.kind() == SpaceKind::Sphere;
    for (std::size_t k = 0; k < s_.size(); ++k) {
      const double w = s_.weight(k);
      if (w == 0.0) continue;
      auto y = s_.point(k);
      const double d = distance(space_, x, y);
      f += w * d * d;
      if (d == 0.0) continue;
      // log_x(y) = d * u / |u| with u the tangent component of y at x.
      double inner = 0.0;
      for (std::size_t i = 0; i < n_; ++i) inner += (sphere || i > 0 ? 1.0 : -1.0) * x[i] * y[i];
      const double sign = sphere ? -1.0 : 1.0;
      double u2 = 0.0;
      for (std::size_t i = 0; i < n_; ++i) {
        const double u = y[i] + sign * inner * x[i];
        u2 += (sphere || i > 0 ? 1.0 : -1.0) * u * u;
      }
      if (!(u2 > 0.0)) continue;  // antipodal on the sphere: no preferred direction
      const double c = w * d / std::sqrt(u2);
      for (std::size_t i = 0; i < n_; ++i) g[i] += c * (y[i] + sign * inner * x[i]);
    }
    for (auto& e : g) e /= total_;
    // Remove the rounding drift off the tangent space.
    g = project_tangent(space_, x, g);
    return f / total_;
  }

  std::vector<double> initial_point() const {
    std::vector<std::vector<double>> candidates;
    std::vector<double> m(n_, 0.0);
    for (std::size_t k = 0; k < s_.size(); ++k) {
      auto y = s_.point(k);
      for (std::size_t i = 0; i < n_; ++i) m[i] += s_.weight(k) * y[i];
    }
    if (space_.kind() == SpaceKind::Sphere) {
      double r = 0.0;
      for (double v : m) r += v * v;
      r = std::sqrt(r);
      if (r > 1e-8 * total_) {
        for (auto& v : m) v /= r;
        candidates.push_back(m);
      }
    } else {
      const double r = std::sqrt(std::max(0.0, -minkowski(m, m)));
      if (r > 0.0) {
        for (auto& v : m) v /= r;
        double tail = 0.0;
        for (std::size_t i = 1; i < n_; ++i) tail += m[i] * m[i];
        m[0] = std::sqrt(1.0 + tail);
        candidates.push_back(m);
      }
    }
    for (auto k : strided_candidates(s_, 8)) {
      auto y = s_.point(k);
      candidates.emplace_back(y.begin(), y.end());
    }
    std::size_t best = 0;
    double best_f = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const double f = frechet_objective(s_, candidates[c]);
      if (f < best_f) {
        best_f = f;
        best = c;
      }
    }
    return candidates[best];
  }

  const SampleView& s_;
  const SpaceDescriptor& space_;
  double total_;
  FrechetOptions opt_;
  std::size_t n_;
};

// Affine-invariant Karcher iteration in whitened coordinates: with R = X^{1/2},
// mean log G = sum w log(R^{-1} Y R^{-1}) / W and X <- R exp(t G) R.
FrechetSolveReport ai_descent(const SampleView& s, double total, const FrechetOptions& opt) {
  const SpaceDescriptor& space = s.points->space();
  const std::size_t q = space.size();
  std::vector<spd::Matrix> ys;
  std::vector<double> ws;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s.weight(k) == 0.0) continue;
    ys.push_back(spd::to_matrix(s.point(k), q));
    ws.push_back(s.weight(k));
  }
  auto evaluate = [&](const spd::Matrix& x, spd::Matrix& g) {
    const spd::Matrix ri = spd::inv_sqrt(x);
    g = spd::Matrix::Zero(q, q);
    double f = 0.0;
    for (std::size_t k = 0; k < ys.size(); ++k) {
      const spd::Matrix l = spd::log(ri * ys[k] * ri);
      f += ws[k] * l.squaredNorm();
      g += ws[k] * l;
    }
    g /= total;
    g = 0.5 * (g + g.transpose());
    return f / total;
  };
  // Start from the better of the weighted arithmetic mean and a few sample points.
  std::vector<spd::Matrix> candidates;
  spd::Matrix arith = spd::Matrix::Zero(q, q);
  for (std::size_t k = 0; k < ys.size(); ++k) arith += ws[k] * ys[k];
  candidates.push_back(arith / total);
  for (auto k : strided_candidates(s, 4)) candidates.push_back(spd::to_matrix(s.point(k), q));
  spd::Matrix x;
  double f = std::numeric_limits<double>::infinity();
  spd::Matrix g;
  for (const auto& c : candidates) {
    spd::Matrix gc;
    const double fc = evaluate(c, gc);
    if (fc < f) {
      f = fc;
      x = c;
      g = gc;
    }
  }
  FrechetSolveReport r;
  r.method = SolveMethod::GradientDescent;
  r.converged = false;
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    if (g.norm() < opt.tolerance) {
      r.converged = true;
      break;
    }
    double step = opt.step;
    bool improved = false;
    const spd::Matrix root = spd::sqrt(x);
    for (int halving = 0; halving < 40; ++halving) {
      spd::Matrix x_new = root * spd::sym_exp(step * g) * root;
      x_new = 0.5 * (x_new + x_new.transpose());
      spd::Matrix g_new;
      const double f_new = evaluate(x_new, g_new);
      if (f_new <= f * (1.0 + 1e-15)) {
        x = x_new;
        g = g_new;
        f = f_new;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  if (!r.converged && g.norm() < opt.tolerance) r.converged = true;
  r.iterations = it;
  r.minimizer = {space, spd::flatten(x)};
  r.objective = f;
  return r;
}

bool euclidean_like(const SpaceDescriptor& s) {
  return s.kind() == SpaceKind::Euclidean || s.kind() == SpaceKind::QuantileGrid;
}

}  // namespace

SampleView view_of(const WeightedSample& sample) {
  if (sample.weights.size() != sample.points.size())
    throw InvalidArgument("weights and points have different lengths");
  return SampleView{&sample.points, {}, sample.weights};
}

DistanceMatrix::DistanceMatrix(const PointSet& points, int threads) : n_(points.size()), d_(n_ * n_, 0.0) {
  parallel_for(n_, threads, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n_; ++j) d_[i * n_ + j] = distance(points.space(), points[i], points[j]);
  });
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < i; ++j) d_[i * n_ + j] = d_[j * n_ + i];
}

double frechet_objective(const SampleView& s, std::span<const double> y) {
  double f = 0.0, total = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double w = s.weight(k);
    total += w;
    if (w == 0.0) continue;
    const double d = distance(s.points->space(), s.point(k), y);
    f += w * d * d;
  }
  return f / total;
}

FrechetSolveReport frechet_mean(const SampleView& s, const FrechetOptions& options) {
  const double total = total_weight(s);
  const SpaceDescriptor& space = s.points->space();
  // A single distinct support point is its own mean.
  std::size_t first = s.size();
  bool single = true;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s.weight(k) == 0.0) continue;
    if (first == s.size()) {
      first = k;
    } else if (s.index(k) != s.index(first)) {
      auto a = s.point(first), b = s.point(k);
      if (!std::equal(a.begin(), a.end(), b.begin())) {
        single = false;
        break;
      }
    }
  }
  if (single) {
    auto p = s.point(first);
    return {MetricPoint{space, {p.begin(), p.end()}}, 0.0, 0, true, SolveMethod::ClosedForm};
  }
  switch (space.kind()) {
    case SpaceKind::Euclidean:
    case SpaceKind::QuantileGrid:
      return closed_form(s, total);
    case SpaceKind::SPD:
      if (space.spd_metric() == SpdMetric::AI) return ai_descent(s, total, options);
      return closed_form(s, total);
    case SpaceKind::Sphere:
    case SpaceKind::Hyperboloid:
      return AmbientDescent(s, total, options).run();
    case SpaceKind::Spheroid:
      return frechet_medoid(s);
  }
  throw InvalidArgument("unsupported space");
}

FrechetSolveReport frechet_mean(const WeightedSample& sample, const FrechetOptions& options) {
  return frechet_mean(view_of(sample), options);
}

double frechet_variance(const SampleView& s, std::span<const double> mean) {
  total_weight(s);
  return frechet_objective(s, mean);
}

double frechet_variance(const WeightedSample& sample, const MetricPoint& mean) {
  if (!(mean.space == sample.points.space())) throw DescriptorMismatch("mean and sample live in different spaces");
  return frechet_variance(view_of(sample), mean.coords);
}

FrechetSolveReport frechet_medoid(const SampleView& s, std::span<const std::uint32_t> candidates,
                                  const DistanceMatrix* distances) {
  const double total = total_weight(s);
  const SpaceDescriptor& space = s.points->space();
  std::vector<std::uint32_t> own;
  if (candidates.empty()) {
    for (std::size_t k = 0; k < s.size(); ++k) own.push_back(static_cast<std::uint32_t>(s.index(k)));
    candidates = own;
  }
  if (candidates.empty()) throw InvalidArgument("empty candidate set");
  if (distances != nullptr && distances->size() != s.points->size())
    throw InvalidArgument("distance matrix does not match the sample");

  std::size_t best = candidates[0];
  double best_f = std::numeric_limits<double>::infinity();
  auto consider = [&](std::size_t c, double f) {
    if (f < best_f || (f == best_f && c < best)) {
      best_f = f;
      best = c;
    }
  };
  if (distances == nullptr && euclidean_like(space)) {
    // For squared Euclidean loss the functional is F(mean) + |c - mean|^2 (scaled), so the
    // medoid is the candidate nearest the weighted mean.
    const auto mean = closed_form(s, total).minimizer.coords;
    for (auto c : candidates) consider(c, distance(space, (*s.points)[c], mean));
    best_f = frechet_objective(s, (*s.points)[best]);
  } else {
    for (auto c : candidates) {
      double f = 0.0;
      for (std::size_t k = 0; k < s.size(); ++k) {
        const double w = s.weight(k);
        if (w == 0.0) continue;
        const double d = distances ? (*distances)(c, s.index(k)) : distance(space, (*s.points)[c], s.point(k));
        f += w * d * d;
        if (f / total > best_f) break;
      }
      consider(c, f / total);
    }
  }
  FrechetSolveReport r;
  r.method = SolveMethod::Medoid;
  r.minimizer = s.points->point(best);
  r.objective = best_f;
  return r;
}

FrechetSolveReport frechet_medoid(const WeightedSample& sample, std::span<const std::uint32_t> candidates,
                                  const DistanceMatrix* distances) {
  return frechet_medoid(view_of(sample), candidates, distances);
}

}  // namespace oobball
