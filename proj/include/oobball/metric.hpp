#pragma once

#include <span>
#include <vector>

#include "oobball/space.hpp"

namespace oobball {

// Geodesic distance. Inputs are assumed valid for `space`.
double distance(const SpaceDescriptor& space, std::span<const double> a, std::span<const double> b);
// Checks that both points share one descriptor.
double distance(const MetricPoint& a, const MetricPoint& b);

// True when distance(a, b) < radius. Avoids the full spheroid solve when simple bounds decide.
bool within(const SpaceDescriptor& space, std::span<const double> a, std::span<const double> b, double radius);

// Minkowski pseudo-inner product -x1 y1 + sum_{i>1} x_i y_i.
double minkowski(std::span<const double> x, std::span<const double> y);

// Tangent vectors are flat buffers. Sphere, Hyperboloid and Euclidean-like spaces use ambient
// coordinates; SPD-AI uses symmetric matrices; SPD-LE uses the matrix-log chart; SPD-LC uses
// log-Cholesky coordinates. Spheroid has no log/exp maps.
std::vector<double> log_map(const SpaceDescriptor& space, std::span<const double> base, std::span<const double> target);
std::vector<double> exp_map(const SpaceDescriptor& space, std::span<const double> base, std::span<const double> tangent);
double tangent_norm(const SpaceDescriptor& space, std::span<const double> base, std::span<const double> tangent);

MetricPoint log_map(const MetricPoint& base, const MetricPoint& target);  // tangent stored in coords
MetricPoint exp_map(const MetricPoint& base, std::span<const double> tangent);

// Projects an arbitrary ambient vector onto the tangent space at base (sphere: remove the
// base component; hyperboloid: Minkowski projection; SPD-AI: symmetrize). Identity elsewhere.
std::vector<double> project_tangent(const SpaceDescriptor& space, std::span<const double> base, std::span<const double> v);
std::size_t tangent_size(const SpaceDescriptor& space);

}  // namespace oobball
