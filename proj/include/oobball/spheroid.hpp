#pragma once

#include <array>
#include <span>

namespace oobball {

// phi(x) = (a x1, a x2, c x3) from the unit sphere onto the spheroid with equatorial
// semi-axis a and polar semi-axis c.
std::array<double, 3> spheroid_map(std::span<const double> x, double a, double c);
std::array<double, 3> spheroid_unmap(std::span<const double> p, double a, double c);

// Length of the shortest geodesic between two points on the spheroid surface.
//
// The inverse problem is solved on the auxiliary sphere, where the spheroid geodesic obeys
//   s / c        = int sqrt(1 + k^2 sin^2 s) ds,
//   lambda - w   = -f sin(alpha0) int (2 - f) / (1 + (1 - f) sqrt(1 + k^2 sin^2 s)) ds,
// with f = (a - c)/a, k^2 = e'^2 cos^2(alpha0), e'^2 = (a^2 - c^2)/c^2. The integrals are
// evaluated by composite Gauss-Legendre quadrature and the auxiliary longitude w is found by
// bracketed root finding (Vincenty's fixed point made robust). Pairs where no bracket exists
// (oblate, nearly antipodal) are solved by shooting on the start azimuth. Typical absolute
// accuracy is 1e-12 times the axis length.
double spheroid_geodesic_distance(std::span<const double> p, std::span<const double> q, double a, double c);

// Distance on S^2 induced by the spheroid map.
double induced_sphere_distance(std::span<const double> x, std::span<const double> y, double a, double c);

// Whether induced_sphere_distance(x, y) < radius, using min(a,c) theta <= d <= max(a,c) theta
// to skip the geodesic solve when possible.
bool induced_sphere_within(std::span<const double> x, std::span<const double> y, double a, double c, double radius);

}  // namespace oobball
