#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace hsr {

inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// SplitMix64 generator producing standard normals by Box-Muller. Every draw
// is a pure function of the starting key, so streams are reproducible on
// any platform independent of the standard library's distributions.
class RandomStream {
 public:
  explicit constexpr RandomStream(std::uint64_t key) : state_(key) {}

  constexpr std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix64_mix(state_);
  }

  // Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Keyed substream derivation. The stream for (trial, position) starts from
//   k0 = mix(master + C0)
//   k1 = mix(k0 ^ mix(trial + C1))
//   key = mix(k1 ^ mix(position + C2))
// with mix = SplitMix64 finalizer. The construction is part of the output
// format: changing it changes every golden file.
struct SeedPolicy {
  std::uint64_t master_seed = 20160101;

  [[nodiscard]] constexpr std::uint64_t key(std::uint64_t trial, std::uint64_t position) const {
    const std::uint64_t k0 = splitmix64_mix(master_seed + 0x6a09e667f3bcc909ULL);
    const std::uint64_t k1 = splitmix64_mix(k0 ^ splitmix64_mix(trial + 0xbb67ae8584caa73bULL));
    return splitmix64_mix(k1 ^ splitmix64_mix(position + 0x3c6ef372fe94f82bULL));
  }

  [[nodiscard]] RandomStream stream(std::uint64_t trial, std::uint64_t position) const {
    return RandomStream(key(trial, position));
  }
};

}  // namespace hsr
