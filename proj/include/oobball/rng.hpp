#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace oobball {

// Splittable generator: a 64-bit Mersenne Twister whose state is seeded from (seed, stream).
// child(key) derives an independent stream, so work keyed by replicate or tree index draws
// the same numbers regardless of scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  Rng child(std::uint64_t key) const;
  Rng child(std::initializer_list<std::uint64_t> keys) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::mt19937_64& engine() { return engine_; }

  double uniform();                       // [0, 1)
  double normal();                        // N(0, 1)
  double gamma(double shape, double scale);
  double beta(double a, double b);
  double chi_squared(double dof);
  std::uint64_t below(std::uint64_t n);  // uniform on {0, ..., n-1}

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

// Stable 64-bit mixing of a string (FNV-1a followed by a splitmix finalizer).
std::uint64_t hash_string(const char* text);

}  // namespace oobball
