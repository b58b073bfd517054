#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace pseudovoc {

/// SplitMix64 (Steele, Lea & Flood 2014). State advances by the golden-ratio
/// increment; each output is the mix64 finalizer of the state. The algorithm
/// is fully specified here, so streams are identical on every platform.
///
/// Derived draws consume the base stream as follows:
///   next_double      1 draw, 53-bit mantissa, value in [0, 1)
///   next_below(n)    1+ draws (rejection keeps the result unbiased)
///   gaussian_pair    2 draws (Box-Muller)
///   next_poisson     k+1 draws for a result of k (Knuth product method)
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  /// Child stream selected by `key`, independent of draws made on the parent.
  /// Used to shard generation per image without losing determinism.
  SplitMix64 split(std::uint64_t key) const {
    return SplitMix64(mix(state_ ^ mix(key + kGamma)));
  }

  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Unbiased integer in [0, n); n must be positive.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  /// Two independent standard normal draws via Box-Muller.
  std::pair<double, double> gaussian_pair() {
    const double u1 = 1.0 - next_double();  // (0, 1], keeps the log finite
    const double u2 = next_double();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

  /// Knuth's product method; adequate for the small rates used here.
  int next_poisson(double mean) {
    const double limit = std::exp(-mean);
    int k = 0;
    double product = 1.0;
    do {
      ++k;
      product *= next_double();
    } while (product > limit);
    return k - 1;
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  static constexpr double kPi = 3.14159265358979323846;

  std::uint64_t state_;
};

}  // namespace pseudovoc
