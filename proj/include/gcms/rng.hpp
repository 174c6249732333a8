#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace gcms {

// xoshiro256++ stream with named substreams. Everything random in the
// artifact flows from one run seed through substream names ("train",
// "folds", "synth", ...), so stages can be re-run independently and still
// reproduce bit-for-bit. No std distributions: their output is
// implementation-defined and would break cross-compiler reproducibility.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed) {
    uint64_t x = seed;
    for (auto& s : state_) s = splitmix64(x);
  }

  // Derives an independent stream from this stream's seed and a name.
  Rng substream(std::string_view name) const {
    return Rng(seed_ ^ fnv1a(name));
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double next_range(double lo, double hi) {
    return lo + (hi - lo) * next_unit();
  }

  // Uniform integer in [lo, hi], inclusive, unbiased by rejection.
  int64_t next_int(int64_t lo, int64_t hi) {
    const uint64_t span = uint64_t(hi - lo) + 1;
    if (span == 0) return int64_t(next_u64());  // full 64-bit range
    const uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return lo + int64_t(x % span);
  }

  // Johnk's sampler; intended for shape parameters <= 1 (mixup uses 0.2).
  double next_beta(double a, double b) {
    for (;;) {
      const double x = std::pow(next_unit(), 1.0 / a);
      const double y = std::pow(next_unit(), 1.0 / b);
      const double s = x + y;
      if (s > 0.0 && s <= 1.0) return x / s;
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      const size_t j = size_t(next_int(0, int64_t(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static uint64_t splitmix64(uint64_t& x) {
    uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static uint64_t fnv1a(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  uint64_t state_[4];
  uint64_t seed_;
};

}  // namespace gcms
