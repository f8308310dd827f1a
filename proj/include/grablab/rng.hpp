#pragma once
// Counter-based splittable RNG. Every draw is a pure function of
// (seed, stream path, counter), so substreams keyed by node index /
// trial index are independent and reproducible across platforms.
// No std::*_distribution anywhere: those are implementation-defined.

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace grablab {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t mix2(uint64_t a, uint64_t b) { return splitmix64(a ^ splitmix64(b)); }

class SplitRng {
 public:
  SplitRng(uint64_t seed, std::initializer_list<uint64_t> path) : key_(splitmix64(seed)) {
    for (uint64_t p : path) key_ = mix2(key_, p);
  }

  uint64_t next() { return mix2(key_, counter_++); }

  // Unbiased uniform draw in [0, n) by rejection.
  uint64_t below(uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    for (;;) {
      uint64_t r = next();
      if (r < limit) return r % n;
    }
  }

  int bit() { return static_cast<int>(next() & 1u); }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
};

inline SplitRng substream(uint64_t seed, std::initializer_list<uint64_t> path) {
  return SplitRng(seed, path);
}

}  // namespace grablab
