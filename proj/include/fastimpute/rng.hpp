#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace fastimpute {

// Deterministic random source used everywhere in the library.
//
// The generator is std::mt19937_64 (fixed by the standard) and all
// derived quantities (uniform doubles, bounded integers, samples) are
// produced from its raw 64-bit output with the explicit algorithms
// below, so a given seed reproduces bit-identical streams across
// compilers and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent child stream; (seed, stream) pairs map to distinct
  // generators via a splitmix64 hash of both words.
  Rng derive(std::uint64_t stream) const;

  std::uint64_t next();

  // Uniform on [0, 1) with 53 bits of precision.
  double uniform01();

  // Uniform on [lo, hi).
  double uniform(double lo, double hi);

  // Standard normal (Box-Muller over uniform01).
  double normal();

  // Uniform integer in [0, n) by rejection; n > 0.
  std::uint64_t bounded(std::uint64_t n);

  // `count` distinct indices drawn uniformly from [0, population) by
  // partial Fisher-Yates. Result is in draw order unless `sorted`.
  std::vector<std::int64_t> sample(std::int64_t population, std::int64_t count,
                                   bool sorted = false);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace fastimpute
