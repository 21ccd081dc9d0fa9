#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace orthoconv {

/// Counter-style splittable generator (SplitMix64). All randomness in the
/// library is explicit-state: a 64-bit seed goes in, numbers come out, and
/// independent streams are derived by mixing tag values into the seed.
/// No hidden global generator exists anywhere.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [-half_width, half_width].
  double next_uniform_symmetric(double half_width) {
    return half_width * (2.0 * next_double() - 1.0);
  }

  /// Standard normal via Box-Muller (one spare cached).
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // Shift u1 away from zero so log() stays finite.
    double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = next_double();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Normalized random direction in R^dim.
  std::vector<double> next_unit_vector(int dim) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    double norm_sq = 0.0;
    for (double& x : v) {
      x = next_normal();
      norm_sq += x * x;
    }
    if (norm_sq == 0.0) {
      v[0] = 1.0;
      return v;
    }
    double inv = 1.0 / std::sqrt(norm_sq);
    for (double& x : v) x *= inv;
    return v;
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Derives an independent stream seed from a master seed and tag values
/// (architecture fields, row indices, purpose tags). Deterministic and
/// order-sensitive.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> tags) {
  SplitMix64 gen(master);
  std::uint64_t x = gen.next_u64();
  for (std::uint64_t tag : tags) {
    SplitMix64 mixer(x ^ (tag + 0x9e3779b97f4a7c15ull));
    x = mixer.next_u64();
  }
  return x;
}

}  // namespace orthoconv
