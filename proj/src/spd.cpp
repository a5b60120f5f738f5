#include "oobball/spd.hpp"

#include <cmath>
#include <sstream>

#include "oobball/errors.hpp"

namespace oobball::spd {

namespace {

struct Eig {
  Eigen::VectorXd values;
  Matrix vectors;
};

Eig eig(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (s + s.transpose()));
  if (solver.info() != Eigen::Success) throw NumericalFailure("symmetric eigendecomposition failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

void check_values(const Eigen::VectorXd& values) {
  const double top = values.maxCoeff();
  const double bottom = values.minCoeff();
  if (!(top > 0.0) || !(bottom > 1e-12 * top)) {
    std::ostringstream msg;
    msg << "matrix is not positive definite (eigenvalues in [" << bottom << ", " << top << "])";
    throw NotPositiveDefinite(msg.str());
  }
}

template <class F>
Matrix apply(const Eig& e, F f) {
  Eigen::VectorXd mapped = e.values.unaryExpr(f);
  return e.vectors * mapped.asDiagonal() * e.vectors.transpose();
}

}  // namespace

Matrix to_matrix(std::span<const double> row_major, std::size_t q) {
  Matrix m(q, q);
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j) m(i, j) = row_major[i * q + j];
  return m;
}

std::vector<double> flatten(const Matrix& m) {
  std::vector<double> out(m.rows() * m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i * m.cols() + j] = m(i, j);
  return out;
}

void check_positive_definite(const Matrix& s) { check_values(eig(s).values); }

Matrix log(const Matrix& s) {
  Eig e = eig(s);
  check_values(e.values);
  return apply(e, [](double v) { return std::log(v); });
}

Matrix sym_exp(const Matrix& v) {
  return apply(eig(v), [](double x) { return std::exp(x); });
}

Matrix sqrt(const Matrix& s) {
  Eig e = eig(s);
  check_values(e.values);
  return apply(e, [](double v) { return std::sqrt(v); });
}

Matrix inv_sqrt(const Matrix& s) {
  Eig e = eig(s);
  check_values(e.values);
  return apply(e, [](double v) { return 1.0 / std::sqrt(v); });
}

Matrix power(const Matrix& s, double p) {
  Eig e = eig(s);
  check_values(e.values);
  return apply(e, [p](double v) { return std::pow(v, p); });
}

Matrix cholesky(const Matrix& s) {
  Eigen::LLT<Matrix> llt(0.5 * (s + s.transpose()));
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("Cholesky factorization failed");
  Matrix l = llt.matrixL();
  return l;
}

std::vector<double> log_cholesky_embed(const Matrix& s) {
  const Matrix l = cholesky(s);
  const auto q = static_cast<std::size_t>(l.rows());
  std::vector<double> out;
  out.reserve(q * (q + 1) / 2);
  for (std::size_t i = 0; i < q; ++i) out.push_back(std::log(l(i, i)));
  for (std::size_t i = 1; i < q; ++i)
    for (std::size_t j = 0; j < i; ++j) out.push_back(l(i, j));
  return out;
}

Matrix log_cholesky_unembed(std::span<const double> embedding, std::size_t q) {
  Matrix l = Matrix::Zero(q, q);
  std::size_t k = 0;
  for (std::size_t i = 0; i < q; ++i) l(i, i) = std::exp(embedding[k++]);
  for (std::size_t i = 1; i < q; ++i)
    for (std::size_t j = 0; j < i; ++j) l(i, j) = embedding[k++];
  return l * l.transpose();
}

double ai_distance(const Matrix& s1, const Matrix& s2) {
  // Eigenvalues of S1^{-1} S2 as the generalized problem S2 v = lambda S1 v.
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(0.5 * (s2 + s2.transpose()),
                                                          0.5 * (s1 + s1.transpose()));
  if (solver.info() != Eigen::Success) throw NotPositiveDefinite("Cholesky factorization failed");
  double total = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double lambda = solver.eigenvalues()[i];
    if (!(lambda > 0.0)) throw NotPositiveDefinite("non-positive generalized eigenvalue");
    const double lg = std::log(lambda);
    total += lg * lg;
  }
  return std::sqrt(total);
}

double lc_distance(const Matrix& s1, const Matrix& s2) {
  const auto e1 = log_cholesky_embed(s1);
  const auto e2 = log_cholesky_embed(s2);
  double total = 0.0;
  for (std::size_t k = 0; k < e1.size(); ++k) total += (e1[k] - e2[k]) * (e1[k] - e2[k]);
  return std::sqrt(total);
}

double le_distance(const Matrix& s1, const Matrix& s2) { return (log(s1) - log(s2)).norm(); }

}  // namespace oobball::spd
