#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace vandet {

// Pcg32 — PCG-XSH-RR 64/32, the permuted-congruential generator used for every
// random decision in the pipeline (reservoir sampling, splits, folds, SGD
// shuffling, tree growing). The constants below are the contract: any
// implementation that reproduces them reproduces every sample, split and model
// in this codebase bit for bit.
//
//   state advance:   state' = state * 6364136223846793005 + increment
//   output (on the pre-advance state s):
//       xorshifted = uint32(((s >> 18) ^ s) >> 27)
//       rot        = uint32(s >> 59)
//       out        = (xorshifted >> rot) | (xorshifted << ((32 - rot) & 31))
//   seeding (seed, stream):
//       increment = (stream << 1) | 1
//       state     = 0; advance; state += seed; advance
//   default stream = 0xda3e39cb94b95bdb
//
// Bounded draws use exact rejection sampling (threshold = 2^64 mod bound), so
// results are unbiased and identical on every platform.
class Pcg32 {
 public:
  static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
  static constexpr std::uint64_t kDefaultStream = 0xda3e39cb94b95bdbULL;

  explicit Pcg32(std::uint64_t seed, std::uint64_t stream = kDefaultStream)
      : state_(0), inc_((stream << 1u) | 1u) {
    next_u32();
    state_ += seed;
    next_u32();
  }

  std::uint32_t next_u32() {
    std::uint64_t old = state_;
    state_ = old * kMultiplier + inc_;
    std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  std::uint64_t next_u64() {
    std::uint64_t hi = next_u32();
    std::uint64_t lo = next_u32();
    return (hi << 32u) | lo;
  }

  // Uniform integer in [0, bound); bound 0 yields 0.
  std::uint64_t bounded(std::uint64_t bound) {
    if (bound <= 1) return 0;
    std::uint64_t threshold = (~bound + 1u) % bound;  // 2^64 mod bound
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11u) * 0x1.0p-53;
  }

  // Fisher-Yates; permutation depends only on (seed state, items.size()).
  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(bounded(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
};

// splitmix64 finalizer, used only to derive independent seeds.
//   z = x + 0x9e3779b97f4a7c15
//   z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//   z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//   return z ^ (z >> 31)
inline std::uint64_t mix64(std::uint64_t x) {
  std::uint64_t z = x + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30u)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27u)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31u);
}

// FNV-1a 64 over bytes (offset 14695981039346656037, prime 1099511628211).
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Deterministic sub-seed for a named role ("split", "fold-pos", batch id, ...).
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  return mix64(seed ^ fnv1a64(label));
}

// Deterministic sub-seed for an indexed role (tree index, epoch, CV cell).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed) ^ index);
}

}  // namespace vandet
