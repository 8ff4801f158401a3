#ifndef MFOS_RNG_HPP
#define MFOS_RNG_HPP

#include <cmath>
#include <cstdint>
#include <string_view>

namespace mfos {

constexpr uint64_t kFnvOffset = 1469598103934665603ull;
constexpr uint64_t kFnvPrime = 1099511628211ull;

inline uint64_t fnv1a64(std::string_view s, uint64_t h = kFnvOffset) {
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

inline uint64_t fnv1a64_bytes(const void* data, size_t n, uint64_t h = kFnvOffset) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

// Counter-based splittable RNG. A stream is identified by an immutable key;
// draws advance a counter, so stream output is a pure function of (key, i).
// split() derives an independent child key without touching the parent's
// counter, which keeps results stable under any parallel work partition.
class Rng {
 public:
  explicit Rng(uint64_t seed) : key_(scramble(seed ^ 0x6a09e667f3bcc908ull)) {}

  uint64_t next_u64() { return scramble(key_ + 0x9e3779b97f4a7c15ull * ++ctr_); }

  // [0, 1), 53-bit resolution
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // one-at-a-time Box-Muller; caches the paired draw
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  uint64_t next_below(uint64_t n) { return next_u64() % n; }

  Rng split(uint64_t stream) const {
    return Rng(scramble(key_ ^ scramble(stream + 0x9e3779b97f4a7c15ull)), 0);
  }

  Rng split(std::string_view label) const { return split(fnv1a64(label)); }

  uint64_t key() const { return key_; }

 private:
  Rng(uint64_t key, int) : key_(key) {}

  // splitmix64 finalizer
  static uint64_t scramble(uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  uint64_t key_;
  uint64_t ctr_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace mfos

#endif
