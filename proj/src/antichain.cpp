#include "fpplab/antichain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fpplab/stats.hpp"

namespace fpplab {

SubsetFamily SubsetFamily::of(int n, std::vector<uint32_t> members) {
  if (n < 0 || n > 20) throw std::invalid_argument("ground set size out of range");
  SubsetFamily f;
  f.n = n;
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  const uint32_t full = n == 0 ? 0u : ((1u << n) - 1u);
  for (uint32_t m : members)
    if ((m & ~full) != 0) throw std::invalid_argument("member uses bits outside the ground set");
  f.members = std::move(members);
  return f;
}

bool is_antichain(const SubsetFamily& fam) {
  const auto& ms = fam.members;
  for (size_t i = 0; i < ms.size(); ++i)
    for (size_t j = i + 1; j < ms.size(); ++j)
      if (subset_of(ms[i], ms[j]) || subset_of(ms[j], ms[i])) return false;
  return true;
}

uint64_t max_antichain_size(int n) {
  if (n < 0 || n > 62) throw std::invalid_argument("ground set size out of range");
  return binomial_coefficient(n, n / 2);
}

bool bound_check(const SubsetFamily& fam) {
  if (fam.n < 1) throw std::invalid_argument("bound check needs a nonempty ground set");
  const auto size = static_cast<uint64_t>(fam.members.size());
  if (size > max_antichain_size(fam.n)) return false;
  if (is_antichain(fam)) {
    const double normalized = std::ldexp(static_cast<double>(size), -fam.n);
    if (normalized > 8.0 / std::sqrt(static_cast<double>(fam.n))) return false;
  }
  return true;
}

SubsetFamily level_set(int n, int k) {
  if (k < 0 || k > n) throw std::invalid_argument("level outside [0,n]");
  std::vector<uint32_t> members;
  for (uint32_t m = 0; m < (1u << n); ++m)
    if (std::popcount(m) == k) members.push_back(m);
  return SubsetFamily::of(n, std::move(members));
}

SubsetFamily random_maximal_antichain(int n, Rng& rng) {
  if (n < 1 || n > 16) throw std::invalid_argument("random antichain supports 1 <= n <= 16");
  std::vector<uint32_t> order(size_t{1} << n);
  std::iota(order.begin(), order.end(), 0u);
  for (size_t i = order.size() - 1; i > 0; --i)
    std::swap(order[i], order[static_cast<size_t>(rng.below(static_cast<int64_t>(i + 1)))]);
  std::vector<uint32_t> chosen;
  for (uint32_t m : order) {
    bool ok = true;
    for (uint32_t c : chosen)
      if (subset_of(m, c) || subset_of(c, m)) {
        ok = false;
        break;
      }
    if (ok) chosen.push_back(m);
  }
  return SubsetFamily::of(n, std::move(chosen));
}

uint64_t brute_force_max_antichain(int n) {
  if (n < 0 || n > 4) throw std::invalid_argument("exhaustive scan supports n <= 4");
  const uint32_t n_masks = 1u << n;          // subsets of the ground set
  const uint64_t n_families = uint64_t{1} << n_masks;  // families of subsets
  uint64_t best = 0;
  for (uint64_t fam = 0; fam < n_families; ++fam) {
    if (static_cast<uint64_t>(std::popcount(fam)) <= best) continue;
    bool anti = true;
    for (uint32_t a = 0; a < n_masks && anti; ++a) {
      if (!(fam >> a & 1)) continue;
      for (uint32_t b = a + 1; b < n_masks; ++b) {
        if (!(fam >> b & 1)) continue;
        if (subset_of(a, b) || subset_of(b, a)) {
          anti = false;
          break;
        }
      }
    }
    if (anti) best = static_cast<uint64_t>(std::popcount(fam));
  }
  return best;
}

}  // namespace fpplab
