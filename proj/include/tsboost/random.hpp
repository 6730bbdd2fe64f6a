#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace tsboost {

// SplitMix64 finalizer, used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

// Seed for the stream identified by (seed, path...). Streams for different
// paths are independent, so work split across threads stays reproducible.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

// Portable random stream: the engine is fully specified by the standard and the
// uniform/normal transforms are implemented here, so draws are bit-identical
// across standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();

  // Uniform integer on [0, bound).
  std::uint64_t below(std::uint64_t bound);

  // Standard normal via the Marsaglia polar method.
  double normal();

  double normal(double mean, double variance);

  // Exponential(1) by inversion.
  double exponential();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace tsboost
