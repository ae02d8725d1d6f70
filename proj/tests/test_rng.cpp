#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "amamm/rng.hpp"

using namespace amamm;

// Known-answer vectors published with the Random123 reference implementation.
TEST_CASE("philox4x32-10 known answers") {
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == Philox4x32Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        Philox4x32Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        Philox4x32Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("uniform draws are pure functions of (seed, stream, index)") {
  const CounterRng a(42, 0), b(42, 0), c(42, 1), d(43, 0);
  for (std::uint64_t i : {0ull, 1ull, 12345ull, (1ull << 40) + 7}) {
    CHECK(a.uniform_pair(i) == b.uniform_pair(i));
    CHECK(a.uniform_pair(i) != c.uniform_pair(i));
    CHECK(a.uniform_pair(i) != d.uniform_pair(i));
  }
}

TEST_CASE("uniforms lie strictly inside (0, 1) and have the right moments") {
  const CounterRng rng(7, 3);
  double sum = 0.0, sum_sq = 0.0;
  const int n = 200000;
  std::set<double> seen;
  for (int i = 0; i < n; ++i) {
    for (double u : rng.uniform_pair(i)) {
      CHECK(u > 0.0);
      CHECK(u < 1.0);
      sum += u;
      sum_sq += u * u;
      if (i < 1000) seen.insert(u);
    }
  }
  const double m = sum / (2.0 * n);
  const double var = sum_sq / (2.0 * n) - m * m;
  CHECK(std::abs(m - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / (2.0 * n)));
  CHECK(std::abs(var - 1.0 / 12.0) < 1e-3);
  CHECK(seen.size() == 2000);
}

TEST_CASE("inverse-CDF transforms") {
  CHECK(exponential_from_uniform(0.5, 2.0) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-15));
  CHECK(standard_normal_from_uniform(0.5) == doctest::Approx(0.0));
  CHECK(standard_normal_from_uniform(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
  CHECK(standard_normal_from_uniform(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-13));
  CHECK(standard_normal_from_uniform(1e-300) < -37.0);
}
