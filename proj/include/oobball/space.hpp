#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace oobball {

enum class SpaceKind { Euclidean, Sphere, Hyperboloid, SPD, QuantileGrid, Spheroid };
enum class SpdMetric { AI, LC, LE };

// One metric space. Text form: euclidean:q, sphere:q, hyperboloid:q, spd:q:ai|lc|le,
// quantile:m, spheroid:a:c.
//
// Sphere and Hyperboloid are q-dimensional manifolds embedded in R^{q+1}. Spheroid points
// are stored as unit vectors of S^2 and measured with the distance induced by the map
// x -> (a x1, a x2, c x3).
class SpaceDescriptor {
 public:
  SpaceDescriptor() = default;  // euclidean:1

  static SpaceDescriptor euclidean(std::size_t q);
  static SpaceDescriptor sphere(std::size_t q);
  static SpaceDescriptor hyperboloid(std::size_t q);
  static SpaceDescriptor spd(std::size_t q, SpdMetric metric);
  static SpaceDescriptor quantile_grid(std::size_t m);
  static SpaceDescriptor spheroid(double a, double c);

  static SpaceDescriptor parse(std::string_view text);

  SpaceKind kind() const { return kind_; }
  // q for Euclidean/Sphere/Hyperboloid/SPD, m for QuantileGrid, 2 for Spheroid.
  std::size_t size() const { return size_; }
  SpdMetric spd_metric() const { return metric_; }
  double semi_axis_a() const { return a_; }
  double semi_axis_c() const { return c_; }

  // Length of the flat coordinate buffer of one point.
  std::size_t coordinate_count() const;
  std::string to_string() const;

  bool operator==(const SpaceDescriptor&) const = default;

 private:
  SpaceKind kind_ = SpaceKind::Euclidean;
  std::size_t size_ = 1;
  SpdMetric metric_ = SpdMetric::AI;
  double a_ = 1.0;
  double c_ = 1.0;
};

// Predictor space: a product of p component spaces, coordinates concatenated.
class ProductSpace {
 public:
  explicit ProductSpace(std::vector<SpaceDescriptor> components);

  // Accepts "product[a,b,...]" or a single bare descriptor.
  static ProductSpace parse(std::string_view text);

  std::size_t arity() const { return components_.size(); }
  const SpaceDescriptor& operator[](std::size_t j) const { return components_[j]; }
  const std::vector<SpaceDescriptor>& components() const { return components_; }
  std::size_t offset(std::size_t j) const { return offsets_[j]; }
  std::size_t coordinate_count() const { return offsets_.back(); }
  std::string to_string() const;

  bool operator==(const ProductSpace& other) const { return components_ == other.components_; }

 private:
  std::vector<SpaceDescriptor> components_;
  std::vector<std::size_t> offsets_;
};

struct MetricPoint {
  SpaceDescriptor space;
  std::vector<double> coords;
};

// Throws InvalidPoint (or NotPositiveDefinite) when the buffer violates the space invariants.
void validate_point(const SpaceDescriptor& space, std::span<const double> coords);
void validate_point(const MetricPoint& point);

// Contiguous storage of points from one space.
class PointSet {
 public:
  explicit PointSet(SpaceDescriptor space, std::size_t count = 0);

  const SpaceDescriptor& space() const { return space_; }
  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  bool empty() const { return data_.empty(); }
  std::size_t dim() const { return dim_; }

  std::span<const double> operator[](std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  std::span<double> operator[](std::size_t i) { return {data_.data() + i * dim_, dim_}; }

  void push_back(std::span<const double> coords);
  void push_back(const MetricPoint& point);
  MetricPoint point(std::size_t i) const;
  PointSet subset(std::span<const std::size_t> indices) const;
  void reserve(std::size_t count) { data_.reserve(count * dim_); }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  // Validates every point; the error message names the offending index.
  void validate() const;

 private:
  SpaceDescriptor space_;
  std::size_t dim_;
  std::vector<double> data_;
};

std::string format_real(double value);

}  // namespace oobball
