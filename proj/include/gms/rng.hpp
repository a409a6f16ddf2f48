#pragma once

// Counter-based random numbers for reproducible, scheduling-independent
// Monte Carlo. Philox4x32-10 (Salmon et al., SC'11) keyed by a 64-bit seed.

#include <array>
#include <cstdint>
#include <limits>

namespace gms {

using Philox4x32Counter = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

inline void philox_mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                           std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

// Ten-round Philox4x32 bijection of `ctr` under `key`.
inline Philox4x32Counter philox4x32(Philox4x32Counter ctr, Philox4x32Key key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    philox_mulhilo(kM0, ctr[0], hi0, lo0);
    philox_mulhilo(kM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

// SplitMix64 output finalizer (a bijection on 64-bit words).
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Per-replica seed: mix(master ^ mix(index + golden)). Injective in `index`
/// for a fixed master since every stage is a bijection.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed,
                                    std::uint64_t replica_index) {
  return splitmix64_mix(master_seed ^
                        splitmix64_mix(replica_index + 0x9E3779B97F4A7C15ull));
}

// Top 53 bits to [0, 1).
constexpr double to_unit_double(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

constexpr Philox4x32Key key_from_seed(std::uint64_t seed) {
  return {static_cast<std::uint32_t>(seed),
          static_cast<std::uint32_t>(seed >> 32)};
}

// Counter word 2 separates independent uses of the same seed.
enum class StreamDomain : std::uint32_t {
  kTrajectory = 0,
  kExcursion = 1,
  kRandomWalk = 2,
  kCoupling = 3,
  kGeneric = 4,
};

/// Sequential UniformRandomBitGenerator over a Philox stream, usable with
/// <random> distributions. Emits two 64-bit words per Philox block.
class PhiloxEngine {
 public:
  using result_type = std::uint64_t;

  PhiloxEngine(std::uint64_t seed, StreamDomain domain)
      : key_(key_from_seed(seed)), domain_(static_cast<std::uint32_t>(domain)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    if (buffered_ == 0) {
      refill();
    }
    return buffer_[--buffered_];
  }

  double uniform() { return to_unit_double((*this)()); }

  std::uint64_t blocks_consumed() const { return block_; }

 private:
  void refill() {
    const auto out = philox4x32(
        {static_cast<std::uint32_t>(block_),
         static_cast<std::uint32_t>(block_ >> 32), domain_, 0u},
        key_);
    ++block_;
    buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    buffered_ = 2;
  }

  Philox4x32Key key_;
  std::uint32_t domain_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

}  // namespace gms
