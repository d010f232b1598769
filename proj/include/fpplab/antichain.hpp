#pragma once

#include <cstdint>
#include <vector>

#include "fpplab/rng.hpp"

namespace fpplab {

// Families of subsets of an n-element ground set (n <= 20), members encoded
// as bitmasks.  Used to certify that extracted configuration sets contain no
// coordinatewise-comparable pair.
struct SubsetFamily {
  int n = 0;
  std::vector<uint32_t> members;  // kept sorted and unique

  static SubsetFamily of(int n, std::vector<uint32_t> members);
};

inline bool subset_of(uint32_t a, uint32_t b) { return (a & ~b) == 0; }

// No two distinct members comparable under inclusion.
bool is_antichain(const SubsetFamily& fam);

// Largest antichain size in the n-cube: C(n, floor(n/2)).
uint64_t max_antichain_size(int n);

// Size caps: |fam| <= C(n, floor(n/2)) always, and for antichains the
// normalized size |fam| / 2^n <= 8 / sqrt(n).
bool bound_check(const SubsetFamily& fam);

// All subsets of given popcount (a level of the n-cube).
SubsetFamily level_set(int n, int k);

// Maximal antichain grown greedily along a seeded shuffle of all masks.
SubsetFamily random_maximal_antichain(int n, Rng& rng);

// Exhaustive scan over all families of the n-cube (n <= 4): the maximum
// size among families that are antichains.
uint64_t brute_force_max_antichain(int n);

}  // namespace fpplab
