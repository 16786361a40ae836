#pragma once

// Counter-based random numbers. Every draw is a pure function of
// (key, stream, counter), so a chain coordinate, particle or replicate owns a
// reproducible substream independent of scheduling and of the other streams.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace tscale {

/// Philox4x32-10 block cipher (Salmon et al., SC'11).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) noexcept {
  constexpr std::uint32_t m0 = 0xD2511F53u;
  constexpr std::uint32_t m1 = 0xCD9E8D57u;
  constexpr std::uint32_t w0 = 0x9E3779B9u;
  constexpr std::uint32_t w1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    key[0] += w0;
    key[1] += w1;
  }
  return ctr;
}

/// SplitMix64 finalizer, used to derive child seeds from a master seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

class CounterRng {
 public:
  constexpr CounterRng() = default;
  explicit constexpr CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  [[nodiscard]] constexpr std::uint64_t seed() const noexcept { return seed_; }

  /// Independent generator for replicate / worker `index`.
  [[nodiscard]] constexpr CounterRng child(std::uint64_t index) const noexcept {
    return CounterRng(splitmix64(seed_ ^ splitmix64(index + 0x632BE59BD9B4E019ull)));
  }

  /// Two independent uniforms in (0, 1) for (stream, counter).
  [[nodiscard]] std::array<double, 2> uniform_pair(std::uint64_t stream,
                                                   std::uint64_t counter) const noexcept {
    const auto out = philox4x32(
        {static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32),
         static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)},
        {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
    const std::uint64_t u0 = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    const std::uint64_t u1 = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
    return {to_open_unit(u0), to_open_unit(u1)};
  }

  [[nodiscard]] double uniform(std::uint64_t stream, std::uint64_t counter) const noexcept {
    return uniform_pair(stream, counter)[0];
  }

  /// Standard normal draw for (stream, counter), Box-Muller on one block.
  [[nodiscard]] double normal(std::uint64_t stream, std::uint64_t counter) const noexcept {
    const auto u = uniform_pair(stream, counter);
    return std::sqrt(-2.0 * std::log(u[0])) * std::cos(2.0 * std::numbers::pi * u[1]);
  }

 private:
  static double to_open_unit(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t seed_ = 0;
};

/// Stream id reserved for the acceptance uniforms of a chain.
inline constexpr std::uint64_t kAcceptStream = ~std::uint64_t{0};

}  // namespace tscale
