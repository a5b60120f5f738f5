#include "oobball/rng.hpp"

#include "oobball/errors.hpp"

namespace oobball {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream), engine_(make_engine(seed, stream)) {}

Rng Rng::child(std::uint64_t key) const { return Rng(seed_, splitmix(stream_ ^ splitmix(key + 0x632be59bd9b4e019ULL))); }

Rng Rng::child(std::initializer_list<std::uint64_t> keys) const {
  Rng r = *this;
  for (auto k : keys) r = r.child(k);
  return r;
}

double Rng::uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

double Rng::normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

double Rng::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) throw InvalidArgument("gamma parameters must be positive");
  return std::gamma_distribution<double>(shape, scale)(engine_);
}

double Rng::beta(double a, double b) {
  const double x = gamma(a, 1.0);
  const double y = gamma(b, 1.0);
  return x / (x + y);
}

double Rng::chi_squared(double dof) { return gamma(dof / 2.0, 2.0); }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("empty range");
  return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
}

std::uint64_t hash_string(const char* text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (; *text; ++text) {
    h ^= static_cast<unsigned char>(*text);
    h *= 0x100000001b3ULL;
  }
  return splitmix(h);
}

}  // namespace oobball
