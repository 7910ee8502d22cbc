#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace swarm {

// splitmix64 finalizer
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Derives an independent child key from (key, sub); used to split the
// master seed into per-run and per-particle streams.
inline constexpr std::uint64_t derive_key(std::uint64_t key, std::uint64_t sub) {
  return mix64(key ^ mix64(sub ^ 0xD1B54A32D192ED03ull));
}

// Counter-based stream: every variate is a pure function of (key, counter),
// so draws are reproducible independently of threading as long as each
// consumer owns its stream and consumes in a fixed order.
struct RngStream {
  std::uint64_t key = 0;
  std::uint64_t counter = 0;

  // uniform on (0,1), endpoints excluded
  double uniform() {
    const std::uint64_t bits = mix64(key + 0x9E3779B97F4A7C15ull * ++counter);
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  // standard normal via Box-Muller; consumes two uniforms per draw
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // uniform index in [0, n); modulo bias is negligible for n << 2^64
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t bits = mix64(key + 0x9E3779B97F4A7C15ull * ++counter);
    return bits % n;
  }
};

inline RngStream make_stream(std::uint64_t seed, std::uint64_t sub) {
  return RngStream{derive_key(seed, sub), 0};
}

}  // namespace swarm
