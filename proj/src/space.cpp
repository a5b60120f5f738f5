#include "oobball/space.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "oobball/errors.hpp"
#include "oobball/spd.hpp"

namespace oobball {

namespace {

std::size_t parse_size(std::string_view text, std::string_view whole) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value == 0)
    throw ParseError("invalid size '" + std::string(text) + "' in space descriptor '" +
                     std::string(whole) + "'");
  return value;
}

double parse_positive(std::string_view text, std::string_view whole) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !(value > 0.0) || !std::isfinite(value))
    throw ParseError("invalid semi-axis '" + std::string(text) + "' in space descriptor '" +
                     std::string(whole) + "'");
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == sep) {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

void require_positive(std::size_t q, const char* what) {
  if (q == 0) throw InvalidArgument(std::string(what) + " dimension must be at least 1");
}

}  // namespace

std::string format_real(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  std::string out(buf, ptr);
  if (std::isfinite(value) && out.find_first_of(".e") == std::string::npos) out += ".0";
  return out;
}

SpaceDescriptor SpaceDescriptor::euclidean(std::size_t q) {
  require_positive(q, "euclidean");
  SpaceDescriptor s;
  s.kind_ = SpaceKind::Euclidean;
  s.size_ = q;
  return s;
}

SpaceDescriptor SpaceDescriptor::sphere(std::size_t q) {
  require_positive(q, "sphere");
  SpaceDescriptor s;
  s.kind_ = SpaceKind::Sphere;
  s.size_ = q;
  return s;
}

SpaceDescriptor SpaceDescriptor::hyperboloid(std::size_t q) {
  require_positive(q, "hyperboloid");
  SpaceDescriptor s;
  s.kind_ = SpaceKind::Hyperboloid;
  s.size_ = q;
  return s;
}

SpaceDescriptor SpaceDescriptor::spd(std::size_t q, SpdMetric metric) {
  require_positive(q, "spd");
  SpaceDescriptor s;
  s.kind_ = SpaceKind::SPD;
  s.size_ = q;
  s.metric_ = metric;
  return s;
}

SpaceDescriptor SpaceDescriptor::quantile_grid(std::size_t m) {
  require_positive(m, "quantile grid");
  SpaceDescriptor s;
  s.kind_ = SpaceKind::QuantileGrid;
  s.size_ = m;
  return s;
}

SpaceDescriptor SpaceDescriptor::spheroid(double a, double c) {
  if (!(a > 0.0) || !(c > 0.0) || !std::isfinite(a) || !std::isfinite(c))
    throw InvalidArgument("spheroid semi-axes must be positive");
  SpaceDescriptor s;
  s.kind_ = SpaceKind::Spheroid;
  s.size_ = 2;
  s.a_ = a;
  s.c_ = c;
  return s;
}

SpaceDescriptor SpaceDescriptor::parse(std::string_view text) {
  const std::string_view whole = text;
  text = trim(text);
  auto parts = split(text, ':');
  const std::string_view name = parts[0];
  if (name == "euclidean" && parts.size() == 2) return euclidean(parse_size(parts[1], whole));
  if (name == "sphere" && parts.size() == 2) return sphere(parse_size(parts[1], whole));
  if (name == "hyperboloid" && parts.size() == 2) return hyperboloid(parse_size(parts[1], whole));
  if (name == "quantile" && parts.size() == 2) return quantile_grid(parse_size(parts[1], whole));
  if (name == "spd" && parts.size() == 3) {
    const std::size_t q = parse_size(parts[1], whole);
    if (parts[2] == "ai") return spd(q, SpdMetric::AI);
    if (parts[2] == "lc") return spd(q, SpdMetric::LC);
    if (parts[2] == "le") return spd(q, SpdMetric::LE);
  }
  if (name == "spheroid" && parts.size() == 3)
    return spheroid(parse_positive(parts[1], whole), parse_positive(parts[2], whole));
  throw ParseError("unrecognized space descriptor '" + std::string(whole) + "'");
}

std::size_t SpaceDescriptor::coordinate_count() const {
  switch (kind_) {
    case SpaceKind::Euclidean:
    case SpaceKind::QuantileGrid:
      return size_;
    case SpaceKind::Sphere:
    case SpaceKind::Hyperboloid:
      return size_ + 1;
    case SpaceKind::SPD:
      return size_ * size_;
    case SpaceKind::Spheroid:
      return 3;
  }
  return size_;
}

std::string SpaceDescriptor::to_string() const {
  switch (kind_) {
    case SpaceKind::Euclidean:
      return "euclidean:" + std::to_string(size_);
    case SpaceKind::Sphere:
      return "sphere:" + std::to_string(size_);
    case SpaceKind::Hyperboloid:
      return "hyperboloid:" + std::to_string(size_);
    case SpaceKind::QuantileGrid:
      return "quantile:" + std::to_string(size_);
    case SpaceKind::SPD: {
      const char* m = metric_ == SpdMetric::AI ? "ai" : metric_ == SpdMetric::LC ? "lc" : "le";
      return "spd:" + std::to_string(size_) + ":" + m;
    }
    case SpaceKind::Spheroid:
      return "spheroid:" + format_real(a_) + ":" + format_real(c_);
  }
  return {};
}

ProductSpace::ProductSpace(std::vector<SpaceDescriptor> components) : components_(std::move(components)) {
  if (components_.empty()) throw InvalidArgument("product space needs at least one component");
  offsets_.push_back(0);
  for (const auto& c : components_) offsets_.push_back(offsets_.back() + c.coordinate_count());
}

ProductSpace ProductSpace::parse(std::string_view text) {
  text = trim(text);
  constexpr std::string_view prefix = "product[";
  if (text.substr(0, prefix.size()) != prefix) return ProductSpace({SpaceDescriptor::parse(text)});
  if (text.back() != ']') throw ParseError("unterminated product descriptor '" + std::string(text) + "'");
  const auto inner = text.substr(prefix.size(), text.size() - prefix.size() - 1);
  if (inner.find('[') != std::string_view::npos)
    throw ParseError("nested product spaces are not allowed");
  std::vector<SpaceDescriptor> components;
  for (auto part : split(inner, ',')) components.push_back(SpaceDescriptor::parse(part));
  return ProductSpace(std::move(components));
}

std::string ProductSpace::to_string() const {
  std::string out = "product[";
  for (std::size_t j = 0; j < components_.size(); ++j) {
    if (j) out += ',';
    out += components_[j].to_string();
  }
  return out + "]";
}

void validate_point(const SpaceDescriptor& space, std::span<const double> x) {
  if (x.size() != space.coordinate_count())
    throw InvalidPoint("expected " + std::to_string(space.coordinate_count()) + " coordinates for " +
                       space.to_string() + ", got " + std::to_string(x.size()));
  for (double v : x)
    if (!std::isfinite(v)) throw InvalidPoint("non-finite coordinate");
  std::ostringstream msg;
  switch (space.kind()) {
    case SpaceKind::Euclidean:
      return;
    case SpaceKind::Sphere:
    case SpaceKind::Spheroid: {
      double norm2 = 0.0;
      for (double v : x) norm2 += v * v;
      if (std::abs(std::sqrt(norm2) - 1.0) > 1e-9) {
        msg << "point is not on the unit sphere (norm " << std::sqrt(norm2) << ")";
        throw InvalidPoint(msg.str());
      }
      return;
    }
    case SpaceKind::Hyperboloid: {
      double inner = -x[0] * x[0];
      for (std::size_t i = 1; i < x.size(); ++i) inner += x[i] * x[i];
      // Rounding in (x,x) grows with x1^2 far from the vertex.
      if (!(x[0] > 0.0) || std::abs(inner + 1.0) > 1e-9 * std::max(1.0, x[0] * x[0])) {
        msg << "point is not on the upper hyperboloid sheet ((x,x) = " << inner << ", x1 = " << x[0] << ")";
        throw InvalidPoint(msg.str());
      }
      return;
    }
    case SpaceKind::SPD: {
      const std::size_t q = space.size();
      double scale = 1.0;
      for (double v : x) scale = std::max(scale, std::abs(v));
      for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = i + 1; j < q; ++j)
          if (std::abs(x[i * q + j] - x[j * q + i]) > 1e-10 * scale)
            throw InvalidPoint("matrix is not symmetric");
      spd::check_positive_definite(spd::to_matrix(x, q));
      return;
    }
    case SpaceKind::QuantileGrid:
      for (std::size_t i = 1; i < x.size(); ++i)
        if (x[i] < x[i - 1]) throw InvalidPoint("quantile values are not nondecreasing");
      return;
  }
}

void validate_point(const MetricPoint& point) { validate_point(point.space, point.coords); }

PointSet::PointSet(SpaceDescriptor space, std::size_t count)
    : space_(space), dim_(space.coordinate_count()), data_(count * dim_, 0.0) {}

void PointSet::push_back(std::span<const double> coords) {
  if (coords.size() != dim_)
    throw InvalidPoint("coordinate count " + std::to_string(coords.size()) + " does not match " +
                       space_.to_string());
  data_.insert(data_.end(), coords.begin(), coords.end());
}

void PointSet::push_back(const MetricPoint& point) {
  if (!(point.space == space_))
    throw DescriptorMismatch("point in " + point.space.to_string() + " added to a set in " + space_.to_string());
  push_back(point.coords);
}

MetricPoint PointSet::point(std::size_t i) const {
  auto s = (*this)[i];
  return {space_, std::vector<double>(s.begin(), s.end())};
}

PointSet PointSet::subset(std::span<const std::size_t> indices) const {
  PointSet out(space_);
  out.reserve(indices.size());
  for (auto i : indices) out.push_back((*this)[i]);
  return out;
}

void PointSet::validate() const {
  for (std::size_t i = 0; i < size(); ++i) {
    try {
      validate_point(space_, (*this)[i]);
    } catch (const InvalidPoint& e) {
      throw InvalidPoint("point " + std::to_string(i) + ": " + e.what());
    }
  }
}

}  // namespace oobball
