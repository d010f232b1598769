#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fpplab {

// SplitMix64 finalizer.  Used both as a seed scrambler and as the per-edge
// hash that makes weight fields a deterministic function of (seed, edge).
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline uint64_t mix_key(uint64_t h, uint64_t v) {
  return splitmix64(h ^ (v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2)));
}

// Every consumer of the master seed lives on its own substream, keyed by a
// tag plus a path of integers (replicate id, annulus index, ...).  Results
// therefore depend only on (seed, purpose, replicate), never on scheduling.
enum class Tag : uint64_t {
  FieldIid = 0x11,
  CouplingPairs,
  CouplingRanks,
  CouplingCounts,
  SplitDraws,
  OffsetCoins,
  Bootstrap,
  Scratch,
  Replicate,
};

inline uint64_t derive_seed(uint64_t master, Tag tag,
                            std::initializer_list<uint64_t> path = {}) {
  uint64_t h = mix_key(master, static_cast<uint64_t>(tag));
  for (uint64_t p : path) h = mix_key(h, p);
  return h;
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t u64() { return gen_(); }

  // Uniform on (0,1), both endpoints excluded: safe to feed into quantile
  // transforms of unbounded distributions.
  double unit_open() { return (static_cast<double>(u64() >> 11) + 0.5) * 0x1.0p-53; }

  // Uniform on [0,1).
  double unit_halfopen() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).  Modulo bias is < 2^-40 for the n used here.
  int64_t below(int64_t n) { return static_cast<int64_t>(u64() % static_cast<uint64_t>(n)); }

  bool coin() { return (u64() & 1ULL) != 0; }

 private:
  std::mt19937_64 gen_;
};

// Unit-interval value keyed by an integer tuple, independent of draw order.
// Weight fields built from these are consistent across different window
// shapes: the same lattice edge gets the same weight under a shared seed.
inline double keyed_unit_open(uint64_t key) {
  return (static_cast<double>(splitmix64(key) >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace fpplab
