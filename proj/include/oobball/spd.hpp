#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace oobball::spd {

using Matrix = Eigen::MatrixXd;

Matrix to_matrix(std::span<const double> row_major, std::size_t q);
std::vector<double> flatten(const Matrix& m);

// Throws NotPositiveDefinite when an eigenvalue is <= 0 or below 1e-12 times the largest.
void check_positive_definite(const Matrix& s);

// Matrix functions through the symmetric eigendecomposition. log/sqrt/inv_sqrt/power check
// positive definiteness first; sym_exp accepts any symmetric matrix.
Matrix log(const Matrix& s);
Matrix sym_exp(const Matrix& v);
Matrix sqrt(const Matrix& s);
Matrix inv_sqrt(const Matrix& s);
Matrix power(const Matrix& s, double p);

// Lower Cholesky factor; throws NotPositiveDefinite on failure.
Matrix cholesky(const Matrix& s);

// Log-Cholesky coordinates: log of the q diagonal entries of the Cholesky factor, then its
// strictly lower entries in row-major order. Length q(q+1)/2.
std::vector<double> log_cholesky_embed(const Matrix& s);
Matrix log_cholesky_unembed(std::span<const double> embedding, std::size_t q);

double ai_distance(const Matrix& s1, const Matrix& s2);
double lc_distance(const Matrix& s1, const Matrix& s2);
double le_distance(const Matrix& s1, const Matrix& s2);

}  // namespace oobball::spd
