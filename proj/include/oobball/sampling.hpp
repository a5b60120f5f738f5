#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "oobball/rng.hpp"
#include "oobball/space.hpp"
#include "oobball/spd.hpp"

namespace oobball {

// Uniform direction in R^ambient.
std::vector<double> sample_uniform_sphere(std::size_t ambient, Rng& rng);

// von Mises-Fisher draw on the unit sphere of R^p (Wood's rejection scheme). kappa = 0 is uniform.
std::vector<double> sample_vmf(std::span<const double> mu, double kappa, Rng& rng);
MetricPoint sample_vmf(const MetricPoint& mu, double kappa, Rng& rng);

// Hyperbolic von Mises-Fisher draw on H^d, density proportional to exp(kappa (x, mu)).
std::vector<double> sample_hvmf(std::span<const double> mu, double kappa, Rng& rng);
MetricPoint sample_hvmf(const MetricPoint& mu, double kappa, Rng& rng);

// Lorentz boost taking the vertex (1, 0, ..., 0) to mu, applied to x.
std::vector<double> hyperbolic_transport(std::span<const double> mu, std::span<const double> x);

// c_d(kappa) = kappa^{(d-1)/2} / ((2 pi)^{(d-1)/2} 2 K_{(d-1)/2}(kappa)), the HvMF normalizer
// on H^d with respect to the Riemannian volume.
double hvmf_normalizing_constant(std::size_t d, double kappa);

// Wishart_q(dof, sigma) via the Bartlett decomposition.
spd::Matrix sample_wishart(double dof, const spd::Matrix& sigma, Rng& rng);

// c_{d,q} = 2 exp(q^{-1} sum_{i=1}^q psi((d - i + 1)/2)); the affine-invariant Frechet mean of
// Wishart_q(d, sigma) is c_{d,q} sigma.
double wishart_ai_constant(double dof, std::size_t q);
spd::Matrix wishart_ai_mean(double dof, const spd::Matrix& sigma);
// Log-Cholesky Frechet mean T T^T of Wishart_q(d, L L^T), with
// T_ii = L_ii sqrt(2) exp(psi((d-i+1)/2)/2) and T_ij = L_ij sqrt(2) Gamma((d-j+2)/2)/Gamma((d-j+1)/2).
spd::Matrix wishart_lc_mean(double dof, const spd::Matrix& sigma);

}  // namespace oobball
