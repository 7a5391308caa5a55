#pragma once

#include <cstdint>

namespace dnls {

// Stateless counter-based generator: every draw is a pure function of
// (seed, stream, counter), so results do not depend on call order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  std::uint64_t bits(std::uint64_t counter) const;
  // Uniform on [0, 1).
  double uniform(std::uint64_t counter) const;
  // Uniform on [-1, 1).
  double symmetric(std::uint64_t counter) const;
  // Standard normal via Box-Muller on two consecutive counters.
  double normal(std::uint64_t counter) const;

  CounterRng substream(std::uint64_t stream) const { return CounterRng(seed_, stream_ * 0x9E3779B97F4A7C15ULL + stream + 1); }
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

}  // namespace dnls
