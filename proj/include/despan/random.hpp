#ifndef DESPAN_RANDOM_HPP
#define DESPAN_RANDOM_HPP

#include <cstdint>

namespace despan {

/// SplitMix64 (Steele, Lea & Flood 2014) used in counter mode.
///
/// A stream is identified by a 64-bit key derived from (master seed, index):
///
///     k0  = mix64(master + GAMMA)
///     key = mix64(k0 + (index + 1) * GAMMA)
///
/// and its output at counter c is
///
///     at(c) = mix64(key + mix64(c + GAMMA))
///
/// where GAMMA = 0x9e3779b97f4a7c15 and mix64 is the SplitMix64 finalizer.
/// Every step is defined on uint64 arithmetic modulo 2^64, so the sequence
/// is identical on every platform. mix64 is a bijection and GAMMA is odd,
/// hence distinct indices under one master always yield distinct keys.
///
/// Random access by counter is what the graph code relies on: the fate of
/// edge (i, j) in a filter is decided by at(pair_counter(i, j)), so it does
/// not depend on which other edges the graph has or on iteration order.
class RandomStream {
 public:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  constexpr RandomStream(std::uint64_t master, std::uint64_t index) noexcept
      : master_(master),
        index_(index),
        key_(mix64(mix64(master + kGamma) + (index + 1) * kGamma)) {}

  constexpr std::uint64_t master() const noexcept { return master_; }
  constexpr std::uint64_t index() const noexcept { return index_; }
  constexpr std::uint64_t key() const noexcept { return key_; }

  constexpr std::uint64_t at(std::uint64_t counter) const noexcept {
    return mix64(key_ + mix64(counter + kGamma));
  }

  // 53-bit uniform in [0, 1).
  constexpr double uniform_at(std::uint64_t counter) const noexcept {
    return static_cast<double>(at(counter) >> 11) * 0x1.0p-53;
  }

  // True with probability p; p >= 1 is always true and p <= 0 never.
  constexpr bool bernoulli_at(std::uint64_t counter, double p) const noexcept {
    return uniform_at(counter) < p;
  }

  // Sequential interface over the same counter space.
  constexpr std::uint64_t next() noexcept { return at(position_++); }
  constexpr double next_uniform() noexcept { return uniform_at(position_++); }
  constexpr std::uint64_t position() const noexcept { return position_; }

  // Uniform integer in [0, bound) by rejection; bound must be > 0.
  constexpr std::uint64_t next_below(std::uint64_t bound) noexcept {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    for (;;) {
      const std::uint64_t x = next();
      if (x < limit) return x % bound;
    }
  }

  friend constexpr bool operator==(const RandomStream& a, const RandomStream& b) noexcept {
    return a.key_ == b.key_ && a.position_ == b.position_;
  }

 private:
  std::uint64_t master_;
  std::uint64_t index_;
  std::uint64_t key_;
  std::uint64_t position_ = 0;
};

inline constexpr RandomStream derive_stream(std::uint64_t master, std::uint64_t index) noexcept {
  return RandomStream(master, index);
}

// Counter for the unordered pair {lo, hi}, lo < hi, both < 2^32.
inline constexpr std::uint64_t pair_counter(std::uint32_t lo, std::uint32_t hi) noexcept {
  return (static_cast<std::uint64_t>(lo) << 32) | hi;
}

// Seed for an independent sub-construction (e.g. one per ordering). The tag
// keeps these apart from trial streams, which use small indices.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag,
                                           std::uint64_t index) noexcept {
  return RandomStream(master, tag).at(index);
}

}  // namespace despan

#endif  // DESPAN_RANDOM_HPP
