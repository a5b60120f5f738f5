#include "oobball/metric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oobball/errors.hpp"
#include "oobball/spd.hpp"
#include "oobball/spheroid.hpp"

namespace oobball {

namespace {

double sq_euclid(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

// atan2-free great-circle angle, accurate for both nearby and nearly antipodal points.
double sphere_distance(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, diff = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    sum += (a[i] + b[i]) * (a[i] + b[i]);
  }
  if (dot >= 0.0) return 2.0 * std::asin(std::clamp(std::sqrt(diff) / 2.0, 0.0, 1.0));
  return std::numbers::pi - 2.0 * std::asin(std::clamp(std::sqrt(sum) / 2.0, 0.0, 1.0));
}

double hyperboloid_distance(std::span<const double> a, std::span<const double> b) {
  const double cosh_d = std::max(1.0, -minkowski(a, b));
  if (cosh_d < 2.0) {
    // (a-b, a-b) = 4 sinh^2(d/2); differences keep precision for close points.
    double m = -(a[0] - b[0]) * (a[0] - b[0]);
    for (std::size_t i = 1; i < a.size(); ++i) m += (a[i] - b[i]) * (a[i] - b[i]);
    return 2.0 * std::asinh(std::sqrt(std::max(0.0, m)) / 2.0);
  }
  return std::acosh(cosh_d);
}

spd::Matrix mat(const SpaceDescriptor& s, std::span<const double> x) { return spd::to_matrix(x, s.size()); }

void require_log_exp(const SpaceDescriptor& space) {
  if (space.kind() == SpaceKind::Spheroid)
    throw InvalidArgument("log/exp maps are not available for " + space.to_string());
}

void check_sizes(const SpaceDescriptor& space, std::span<const double> a, std::span<const double> b) {
  if (a.size() != space.coordinate_count() || b.size() != space.coordinate_count())
    throw DescriptorMismatch("coordinate count does not match " + space.to_string());
}

}  // namespace

double minkowski(std::span<const double> x, std::span<const double> y) {
  double s = -x[0] * y[0];
  for (std::size_t i = 1; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double distance(const SpaceDescriptor& space, std::span<const double> a, std::span<const double> b) {
  switch (space.kind()) {
    case SpaceKind::Euclidean:
      return std::sqrt(sq_euclid(a, b));
    case SpaceKind::QuantileGrid:
      return std::sqrt(sq_euclid(a, b) / static_cast<double>(a.size()));
    case SpaceKind::Sphere:
      return sphere_distance(a, b);
    case SpaceKind::Hyperboloid:
      return hyperboloid_distance(a, b);
    case SpaceKind::SPD:
      switch (space.spd_metric()) {
        case SpdMetric::AI:
          return spd::ai_distance(mat(space, a), mat(space, b));
        case SpdMetric::LC:
          return spd::lc_distance(mat(space, a), mat(space, b));
        case SpdMetric::LE:
          return spd::le_distance(mat(space, a), mat(space, b));
      }
      break;
    case SpaceKind::Spheroid:
      return induced_sphere_distance(a, b, space.semi_axis_a(), space.semi_axis_c());
  }
  return 0.0;
}

double distance(const MetricPoint& a, const MetricPoint& b) {
  if (!(a.space == b.space))
    throw DescriptorMismatch("distance between " + a.space.to_string() + " and " + b.space.to_string());
  check_sizes(a.space, a.coords, b.coords);
  return distance(a.space, a.coords, b.coords);
}

bool within(const SpaceDescriptor& space, std::span<const double> a, std::span<const double> b, double radius) {
  if (space.kind() == SpaceKind::Spheroid)
    return induced_sphere_within(a, b, space.semi_axis_a(), space.semi_axis_c(), radius);
  return distance(space, a, b) < radius;
}

std::size_t tangent_size(const SpaceDescriptor& space) {
  if (space.kind() == SpaceKind::SPD && space.spd_metric() == SpdMetric::LC)
    return space.size() * (space.size() + 1) / 2;
  return space.coordinate_count();
}

std::vector<double> log_map(const SpaceDescriptor& space, std::span<const double> base, std::span<const double> target) {
  require_log_exp(space);
  check_sizes(space, base, target);
  const std::size_t n = base.size();
  std::vector<double> v(n);
  switch (space.kind()) {
    case SpaceKind::Euclidean:
    case SpaceKind::QuantileGrid:
      for (std::size_t i = 0; i < n; ++i) v[i] = target[i] - base[i];
      return v;
    case SpaceKind::Sphere: {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += base[i] * target[i];
      double norm2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        v[i] = target[i] - dot * base[i];
        norm2 += v[i] * v[i];
      }
      const double theta = sphere_distance(base, target);
      const double norm = std::sqrt(norm2);
      if (theta > std::numbers::pi - 1e-7)
        throw NonUniqueGeodesic("log map undefined for antipodal sphere points");
      if (norm == 0.0 || theta == 0.0) {
        std::fill(v.begin(), v.end(), 0.0);
        return v;
      }
      for (auto& x : v) x *= theta / norm;
      return v;
    }
    case SpaceKind::Hyperboloid: {
      const double inner = minkowski(base, target);
      for (std::size_t i = 0; i < n; ++i) v[i] = target[i] + inner * base[i];
      const double norm = std::sqrt(std::max(0.0, minkowski(v, v)));
      const double theta = hyperboloid_distance(base, target);
      if (norm == 0.0 || theta == 0.0) {
        std::fill(v.begin(), v.end(), 0.0);
        return v;
      }
      for (auto& x : v) x *= theta / norm;
      return v;
    }
    case SpaceKind::SPD: {
      const auto s = mat(space, base), t = mat(space, target);
      switch (space.spd_metric()) {
        case SpdMetric::AI: {
          const auto r = spd::sqrt(s), ri = spd::inv_sqrt(s);
          return spd::flatten(r * spd::log(ri * t * ri) * r);
        }
        case SpdMetric::LE:
          return spd::flatten(spd::log(t) - spd::log(s));
        case SpdMetric::LC: {
          auto es = spd::log_cholesky_embed(s), et = spd::log_cholesky_embed(t);
          for (std::size_t i = 0; i < es.size(); ++i) et[i] -= es[i];
          return et;
        }
      }
      break;
    }
    case SpaceKind::Spheroid:
      break;
  }
  return v;
}

std::vector<double> exp_map(const SpaceDescriptor& space, std::span<const double> base, std::span<const double> tangent) {
  require_log_exp(space);
  if (tangent.size() != tangent_size(space)) throw InvalidArgument("tangent size does not match " + space.to_string());
  const std::size_t n = base.size();
  std::vector<double> out(n);
  switch (space.kind()) {
    case SpaceKind::Euclidean:
    case SpaceKind::QuantileGrid:
      for (std::size_t i = 0; i < n; ++i) out[i] = base[i] + tangent[i];
      return out;
    case SpaceKind::Sphere: {
      double norm2 = 0.0, dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        norm2 += tangent[i] * tangent[i];
        dot += tangent[i] * base[i];
      }
      const double norm = std::sqrt(norm2);
      if (std::abs(dot) > 1e-9 * std::max(1.0, norm)) throw InvalidArgument("vector is not tangent to the sphere");
      if (norm == 0.0) return {base.begin(), base.end()};
      const double c = std::cos(norm), s = std::sin(norm) / norm;
      double r2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        out[i] = c * base[i] + s * tangent[i];
        r2 += out[i] * out[i];
      }
      const double r = std::sqrt(r2);
      for (auto& x : out) x /= r;
      return out;
    }
    case SpaceKind::Hyperboloid: {
      const double dot = minkowski(tangent, base);
      double scale = 0.0;
      for (double t : tangent) scale = std::max(scale, std::abs(t));
      if (std::abs(dot) > 1e-9 * std::max(1.0, scale * std::abs(base[0])))
        throw InvalidArgument("vector is not tangent to the hyperboloid");
      const double norm = std::sqrt(std::max(0.0, minkowski(tangent, tangent)));
      if (norm == 0.0) return {base.begin(), base.end()};
      const double c = std::cosh(norm), s = std::sinh(norm) / norm;
      double tail = 0.0;
      for (std::size_t i = 1; i < n; ++i) {
        out[i] = c * base[i] + s * tangent[i];
        tail += out[i] * out[i];
      }
      out[0] = std::sqrt(1.0 + tail);
      return out;
    }
    case SpaceKind::SPD: {
      const auto s = mat(space, base);
      switch (space.spd_metric()) {
        case SpdMetric::AI: {
          const auto v = spd::to_matrix(tangent, space.size());
          const auto r = spd::sqrt(s), ri = spd::inv_sqrt(s);
          spd::Matrix w = ri * v * ri;
          spd::Matrix e = r * spd::sym_exp(0.5 * (w + w.transpose())) * r;
          return spd::flatten(0.5 * (e + e.transpose()));
        }
        case SpdMetric::LE: {
          const auto v = spd::to_matrix(tangent, space.size());
          spd::Matrix l = spd::log(s) + 0.5 * (v + v.transpose());
          return spd::flatten(spd::sym_exp(l));
        }
        case SpdMetric::LC: {
          auto e = spd::log_cholesky_embed(s);
          for (std::size_t i = 0; i < e.size(); ++i) e[i] += tangent[i];
          return spd::flatten(spd::log_cholesky_unembed(e, space.size()));
        }
      }
      break;
    }
    case SpaceKind::Spheroid:
      break;
  }
  return out;
}

double tangent_norm(const SpaceDescriptor& space, std::span<const double> base, std::span<const double> tangent) {
  switch (space.kind()) {
    case SpaceKind::Hyperboloid:
      return std::sqrt(std::max(0.0, minkowski(tangent, tangent)));
    case SpaceKind::QuantileGrid: {
      double s = 0.0;
      for (double t : tangent) s += t * t;
      return std::sqrt(s / static_cast<double>(tangent.size()));
    }
    case SpaceKind::SPD:
      if (space.spd_metric() == SpdMetric::AI) {
        const auto ri = spd::inv_sqrt(mat(space, base));
        return (ri * spd::to_matrix(tangent, space.size()) * ri).norm();
      }
      [[fallthrough]];
    default: {
      double s = 0.0;
      for (double t : tangent) s += t * t;
      return std::sqrt(s);
    }
  }
}

std::vector<double> project_tangent(const SpaceDescriptor& space, std::span<const double> base, std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  switch (space.kind()) {
    case SpaceKind::Sphere: {
      double dot = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) dot += v[i] * base[i];
      for (std::size_t i = 0; i < v.size(); ++i) out[i] -= dot * base[i];
      break;
    }
    case SpaceKind::Hyperboloid: {
      const double dot = minkowski(v, base);
      for (std::size_t i = 0; i < v.size(); ++i) out[i] += dot * base[i];
      break;
    }
    case SpaceKind::SPD:
      if (space.spd_metric() != SpdMetric::LC) {
        const auto m = spd::to_matrix(v, space.size());
        out = spd::flatten(0.5 * (m + m.transpose()));
      }
      break;
    default:
      break;
  }
  return out;
}

MetricPoint log_map(const MetricPoint& base, const MetricPoint& target) {
  if (!(base.space == target.space)) throw DescriptorMismatch("log map across different spaces");
  return {base.space, log_map(base.space, base.coords, target.coords)};
}

MetricPoint exp_map(const MetricPoint& base, std::span<const double> tangent) {
  return {base.space, exp_map(base.space, base.coords, tangent)};
}

}  // namespace oobball
