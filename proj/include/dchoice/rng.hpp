#pragma once

#include <cstdint>
#include <random>

namespace dchoice {

inline constexpr std::uint64_t kDefaultSeed = 20240601;

// Seeded pseudo-random source. All sampling in the library draws from one of
// these; nothing touches global random state, so a stream per thread is
// enough for concurrent use.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = kDefaultSeed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  // Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  // Exponential with the given rate.
  double exponential(double rate);
  // Standard logistic variate.
  double logistic();

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
  std::uint64_t seed_;
};

}  // namespace dchoice
