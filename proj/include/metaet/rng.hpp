#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace metaet {

/// Counter-based deterministic random stream.
///
/// Each stream is a pure function of a 64-bit key: draw i returns
/// mix(key + (i+1)*golden), the SplitMix64 output function over a Weyl
/// sequence. Streams for different (seed, stream_index) pairs are derived
/// by double-mixing the pair into the key, so a stream's outputs never
/// depend on how many sibling streams were consumed before it. This is
/// what makes task-level sampling safe to run in any order or in parallel.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : key_(key) {}

  /// Derives an independent stream from (seed, stream_index).
  static Rng keyed(std::uint64_t seed, std::uint64_t stream_index) {
    return Rng(mix64(mix64(seed ^ 0x8E9C5F3D7A1B42E5ULL) + stream_index));
  }

  std::uint64_t next_u64() {
    counter_ += 1;
    return mix64(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
  }

  /// Uniform double in [0, 1), 53 mantissa bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). Unbiased via rejection; n must be > 0.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0ULL - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  /// Standard normal draw (Box-Muller, one value per two uniforms).
  double next_normal();

  /// In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  /// k distinct indices drawn uniformly from 0..n-1 (partial Fisher-Yates).
  std::vector<int> sample_indices(int n, int k);

 private:
  static std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace metaet
