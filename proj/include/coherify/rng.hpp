#pragma once

#include <cstdint>

namespace coherify {

/// SplitMix64 (Steele, Lea, Flood 2014). Output n of the stream keyed by k is
/// mix(k + (n + 1) * 0x9E3779B97F4A7C15) with
///   mix(z): z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
///           z = (z ^ (z >> 27)) * 0x94D049BB133111EB;
///           return z ^ (z >> 31).
/// Uniform doubles take the top 53 bits: (x >> 11) * 2^-53. Normals use
/// Box-Muller on (1 - u1, u2), consuming two uniforms per pair.
class SplitMix64 {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit SplitMix64(std::uint64_t key) : state_(key) {}

  /// Independent stream for worker/sample `index` under `seed`: keyed by
  /// mix(seed + (index + 1) * kGamma) xor seed.
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t index);

  static std::uint64_t mix(std::uint64_t z);

  std::uint64_t next();
  /// In [0, 1).
  double uniform();
  double normal();

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace coherify
