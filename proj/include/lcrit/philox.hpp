#pragma once

#include <array>
#include <cstdint>
#include <numbers>

namespace lcrit {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Output is a
// pure function of (counter, key); there is no hidden state.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;

  static constexpr Counter block(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Independent key streams derived from one user seed.
enum class KeyDomain : std::uint64_t {
  prime_angles = 1,
  ordinates = 2,
  permutations = 3,
  synthetic = 4,
  bs_batch = 5,
};

constexpr Philox4x32::Key derive_key(std::uint64_t seed, KeyDomain domain) noexcept {
  const std::uint64_t k = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(domain)));
  return {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

constexpr Philox4x32::Counter make_counter(std::uint64_t a, std::uint64_t b) noexcept {
  return {static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32), static_cast<std::uint32_t>(b),
          static_cast<std::uint32_t>(b >> 32)};
}

/// Two uniforms in [0, 1) with 53-bit resolution from one block.
constexpr std::array<double, 2> uniform_pair(const Philox4x32::Counter& out) noexcept {
  const std::uint64_t a = (static_cast<std::uint64_t>(out[0]) << 32 | out[1]) >> 11;
  const std::uint64_t b = (static_cast<std::uint64_t>(out[2]) << 32 | out[3]) >> 11;
  constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
  return {static_cast<double>(a) * scale, static_cast<double>(b) * scale};
}

/// Uniform [0,1) draws addressed by (domain key, a, b).
class CounterUniform {
 public:
  CounterUniform(std::uint64_t seed, KeyDomain domain) : key_(derive_key(seed, domain)) {}

  std::array<double, 2> pair(std::uint64_t a, std::uint64_t b) const noexcept {
    return uniform_pair(Philox4x32::block(make_counter(a, b), key_));
  }
  double operator()(std::uint64_t a, std::uint64_t b) const noexcept { return pair(a, b)[0]; }

 private:
  Philox4x32::Key key_;
};

}  // namespace lcrit
