#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace ordvar {

/// Identifies one random stream: the master seed keys the generator, the
/// stream id selects the upper half of its counter.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  bool operator==(const SeedSpec&) const = default;
};

namespace detail {

// splitmix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Derived stream for one replication. Injective in replication_index for a
/// fixed parent; distinct parents are scrambled before the index is added.
constexpr SeedSpec substream(const SeedSpec& seed, std::uint64_t replication_index) {
  return {seed.master_seed, detail::mix64(seed.stream_id) + replication_index};
}

/// Philox4x32-10 counter-based generator.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;
  using result_type = std::uint64_t;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  explicit Philox4x32(const SeedSpec& seed)
      : key_{static_cast<std::uint32_t>(seed.master_seed),
             static_cast<std::uint32_t>(seed.master_seed >> 32)},
        stream_lo_(static_cast<std::uint32_t>(seed.stream_id)),
        stream_hi_(static_cast<std::uint32_t>(seed.stream_id >> 32)) {}

  /// The raw bijection: ten rounds of the Philox S-box under `key`.
  static Counter block(Counter ctr, Key key) {
    constexpr std::uint32_t kM0 = 0xD2511F53u;
    constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u;
    constexpr std::uint32_t kW1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

  result_type operator()() {
    if (buffered_ == 0) refill();
    --buffered_;
    return buffer_[buffered_];
  }

  /// Uniform on (0, 1), never exactly 0 or 1.
  double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

  /// Counter blocks consumed so far.
  std::uint64_t blocks_used() const noexcept { return index_; }

 private:
  void refill() {
    const Counter out = block({static_cast<std::uint32_t>(index_),
                               static_cast<std::uint32_t>(index_ >> 32), stream_lo_, stream_hi_},
                              key_);
    ++index_;
    // Served back to front by operator().
    buffer_[1] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    buffer_[0] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    buffered_ = 2;
  }

  Key key_;
  std::uint32_t stream_lo_, stream_hi_;
  std::uint64_t index_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

}  // namespace ordvar
