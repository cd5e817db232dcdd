#pragma once

#include <cstdint>

namespace odor {

/// Streaming 64-bit hash over unsigned words (FNV-1a over the 8 bytes of
/// each word, seeded with a pinned offset basis). Not cryptographic; the
/// fixed seed makes fingerprints reproducible across platforms and runs.
class Hash64 {
 public:
  static constexpr uint64_t kSeed = 0xcbf29ce484222325ULL;
  static constexpr uint64_t kPrime = 0x100000001b3ULL;

  Hash64& mix(uint64_t word) {
    for (int i = 0; i < 8; ++i) {
      state_ ^= (word >> (i * 8)) & 0xff;
      state_ *= kPrime;
    }
    return *this;
  }

  Hash64& mix_signed(int64_t word) { return mix(static_cast<uint64_t>(word)); }

  uint64_t digest() const { return state_; }

 private:
  uint64_t state_ = kSeed;
};

}  // namespace odor
