#include <cmath>
#include <set>

#include "doctest.h"
#include "tscale/rng.hpp"

using namespace tscale;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("draws are pure functions of (seed, stream, counter)") {
  const CounterRng a(42), b(42), c(43);
  CHECK(a.normal(3, 17) == b.normal(3, 17));
  CHECK(a.normal(3, 17) != c.normal(3, 17));
  CHECK(a.normal(3, 17) != a.normal(4, 17));
  CHECK(a.normal(3, 17) != a.normal(3, 18));
  CHECK(a.child(5).seed() == b.child(5).seed());
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(a.child(i).seed());
  CHECK(seeds.size() == 1000);
}

TEST_CASE("uniforms lie in (0, 1) and normals have unit moments") {
  const CounterRng rng(9);
  double s1 = 0, s2 = 0, s4 = 0, us = 0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform(1, i);
    CHECK_UNARY(u > 0.0 && u < 1.0);
    us += u;
    const double z = rng.normal(0, i);
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  CHECK(std::abs(us / n - 0.5) <= 5 * std::sqrt(1.0 / 12 / n));
  CHECK(std::abs(s1 / n) <= 5 / std::sqrt(double(n)));
  CHECK(std::abs(s2 / n - 1) <= 5 * std::sqrt(2.0 / n));
  CHECK(std::abs(s4 / n - 3) <= 5 * std::sqrt(96.0 / n));
}
