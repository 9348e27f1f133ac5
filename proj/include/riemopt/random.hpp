#pragma once

// Counter-based random numbers for reproducible instances.
//
// The block function is Threefry-2x32 with 20 rounds, bit-compatible with the
// Random123 1.14 reference (and with jax.random's threefry_2x32). Gaussian
// deviates use the Box-Muller transform on our own uniforms so that streams do
// not depend on the standard library's distribution implementations.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include <Eigen/Core>

namespace riemopt {

using Threefry2x32Block = std::array<std::uint32_t, 2>;

inline Threefry2x32Block threefry2x32_20(Threefry2x32Block key, Threefry2x32Block ctr) {
  constexpr std::array<int, 8> rotations{13, 15, 26, 6, 17, 29, 16, 24};
  const std::array<std::uint32_t, 3> ks{key[0], key[1], 0x1BD11BDAu ^ key[0] ^ key[1]};
  auto rotl = [](std::uint32_t v, int r) { return (v << r) | (v >> (32 - r)); };

  std::uint32_t x0 = ctr[0] + ks[0];
  std::uint32_t x1 = ctr[1] + ks[1];
  for (int round = 0; round < 20; ++round) {
    x0 += x1;
    x1 = rotl(x1, rotations[round % 8]);
    x1 ^= x0;
    if (round % 4 == 3) {
      const std::uint32_t inject = static_cast<std::uint32_t>(round / 4 + 1);
      x0 += ks[inject % 3];
      x1 += ks[(inject + 1) % 3] + inject;
    }
  }
  return {x0, x1};
}

/// Sequential generator over a Threefry keyspace. The key is derived from a
/// 64-bit seed and a stream id, the counter walks 0, 1, 2, ...
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint32_t stream)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32) ^ (stream * 0x9E3779B9u)} {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const auto block = threefry2x32_20(key_, {static_cast<std::uint32_t>(counter_),
                                              static_cast<std::uint32_t>(counter_ >> 32)});
    ++counter_;
    return (static_cast<std::uint64_t>(block[1]) << 32) | block[0];
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t v = (*this)();
    while (v >= limit) v = (*this)();
    return v % bound;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  Eigen::VectorXd normal_vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  std::uint64_t counter() const { return counter_; }

 private:
  Threefry2x32Block key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace riemopt
