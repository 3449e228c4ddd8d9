#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace ccsim {

constexpr std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent sub-stream seed from a root seed and a path of
// integer keys (day, purpose, replication, ...). Keys are absorbed one at a
// time, so the seed of replication r never depends on how many replications
// are requested.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t state = root;
  std::uint64_t out = splitmix64_next(state);
  for (std::uint64_t key : path) {
    state = out ^ (key * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    out = splitmix64_next(state);
  }
  return out;
}

// Named sub-streams of one replication.
enum class Stream : std::uint64_t {
  kArrivals = 1,
  kHandling = 2,
  kPatience = 3,
  kResample = 4,
  kReality = 5,
  kJitter = 6,
};

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  // Index in [0, n).
  std::size_t index(std::size_t n) noexcept {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

  double exponential(double mean) noexcept { return -mean * std::log1p(-uniform()); }

  double normal(double mu, double sigma) { return std::normal_distribution<double>(mu, sigma)(engine_); }

  double lognormal(double mu_log, double sigma_log) { return std::exp(normal(mu_log, sigma_log)); }

  std::int64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    return std::poisson_distribution<std::int64_t>(mean)(engine_);
  }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

inline RandomStream make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  return RandomStream(derive_seed(seed, path));
}

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace ccsim
