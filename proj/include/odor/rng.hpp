#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace odor {

/// splitmix64 stream. Used everywhere randomness is needed so that runs are
/// reproducible from the seed independent of platform or standard library.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  uint64_t below(uint64_t n) { return next() % n; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

  /// Derives an independent stream (e.g. one per purpose from a run seed).
  Rng fork(uint64_t salt) { return Rng(state_ ^ (0x517cc1b727220a95ULL * (salt + 1))); }

 private:
  uint64_t state_;
};

}  // namespace odor
