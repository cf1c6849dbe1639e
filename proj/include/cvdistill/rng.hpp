#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

// Reproducibility contract for every stochastic routine in the library:
//   * generator: xoshiro256** (Blackman & Vigna), state filled from four
//     successive SplitMix64 outputs;
//   * substreams: stream k of a run with seed s is seeded from
//     SplitMix64(s + (k + 1) * 0x9E3779B97F4A7C15);
//   * normals: Box-Muller on two 53-bit uniforms, both outputs used in order.
// Work is always partitioned into substreams by a fixed block index, never by
// thread id, so results do not depend on the number of workers.

namespace cvdistill::rng {

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) noexcept {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  /// Raw state, for checking against reference vectors.
  static Xoshiro256 from_state(const std::array<std::uint64_t, 4>& state) noexcept {
    Xoshiro256 g(0);
    for (std::size_t i = 0; i < 4; ++i) g.s_[i] = state[i];
    return g;
  }

  /// Independent substream `stream` of a run seeded with `seed`.
  static Xoshiro256 substream(std::uint64_t seed, std::uint64_t stream) noexcept {
    return Xoshiro256(seed + (stream + 1) * 0x9E3779B97F4A7C15ULL);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform in [0, 1).
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), multiply-shift reduction.
  std::uint64_t below(std::uint64_t n) noexcept {
    __extension__ using u128 = unsigned __int128;
    return static_cast<std::uint64_t>((static_cast<u128>((*this)()) * n) >> 64);
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

/// Standard normal variates by Box-Muller with the spare value cached.
class NormalSource {
 public:
  explicit NormalSource(Xoshiro256 engine) noexcept : engine_(engine) {}

  double operator()() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - engine_.uniform();  // (0, 1]
    const double u2 = engine_.uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double phase = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(phase);
    has_spare_ = true;
    return radius * std::cos(phase);
  }

  double uniform() noexcept { return engine_.uniform(); }
  Xoshiro256& engine() noexcept { return engine_; }

 private:
  Xoshiro256 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cvdistill::rng
