#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "oobball/rng.hpp"
#include "oobball/space.hpp"
#include "oobball/spd.hpp"

namespace oobball {

// One line of a validation report: the measured value is compared with the tolerance.
struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct ValidationReport {
  std::vector<Check> checks;

  bool passed() const;
  void add(std::string name, double value, double tolerance, bool passed);
  // Adds a check that passes when value <= tolerance.
  void add_at_most(std::string name, double value, double tolerance);
};

void print_report(std::ostream& out, const ValidationReport& report);

// Random valid point of a space (used by the property suites and tests).
std::vector<double> random_point(const SpaceDescriptor& space, Rng& rng);

struct MeansConfig {
  std::size_t q = 2;
  double dof = 15.0;
  spd::Matrix sigma;           // empty means the identity
  std::size_t draws = 25000;
  std::size_t grid = 600;      // equispaced t values on [-1, 2]
  std::uint64_t seed = 1;
  int threads = 1;
  // Test hook: scales both closed-form means by 1.25 so that the checks must fail.
  bool corrupt = false;
};

struct MeansResult {
  std::vector<double> t;
  std::vector<double> ai_loss;  // normalized Frechet loss along M(t), affine-invariant
  std::vector<double> lc_loss;  // same, log-Cholesky
  std::size_t ai_argmin = 0;
  std::size_t lc_argmin = 0;
  double step = 0.0;
  ValidationReport report;
};

// Normalized Frechet loss of Wishart draws along the path through the extrinsic mean (t = -1
// and t = 2), the closed-form AI mean (t = 0) and the closed-form LC mean (t = 1). The AI
// loss should be smallest near t = 0 and the LC loss near t = 1.
MeansResult validate_frechet_means(const MeansConfig& config);

// M(t) for the path above.
spd::Matrix mean_path(double t, const spd::Matrix& m_ai, const spd::Matrix& m_lc, const spd::Matrix& m_ext);

struct GeometryConfig {
  std::size_t triples = 10000;
  std::uint64_t seed = 1;
  int threads = 1;
};

// Metric axioms on random triples for every supported space, the log-Cholesky isometry and
// the agreement of the a = c = 1 spheroid metric with the sphere.
ValidationReport validate_geometry(const GeometryConfig& config);

// HvMF normalizer against direct quadrature for d in {2, 3}, kappa in {1, 10, 50}, and the
// sample Frechet mean of `draws` HvMF draws at kappa = 50.
ValidationReport validate_hvmf(std::uint64_t seed = 1, std::size_t draws = 100000);

}  // namespace oobball
