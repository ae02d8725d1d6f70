// Counter-based random numbers (Philox4x32-10).
//
// Every draw is a pure function of (seed, stream, index), so a Monte-Carlo run
// can be split over any partition of its index range and still reproduce the
// same numbers.
#pragma once

#include <array>
#include <cstdint>

namespace amamm {

using Philox4x32Counter = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

Philox4x32Counter philox4x32_10(Philox4x32Counter counter, Philox4x32Key key);

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint32_t stream = 0) : seed_(seed), stream_(stream) {}

  // Two independent uniforms in the open interval (0, 1), 53-bit resolution.
  std::array<double, 2> uniform_pair(std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }
  std::uint32_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint32_t stream_;
};

// Inverse-CDF transforms of a uniform in (0, 1).
double exponential_from_uniform(double u, double mean);
double standard_normal_from_uniform(double u);

}  // namespace amamm
