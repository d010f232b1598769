#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fpplab/field.hpp"
#include "fpplab/geometry.hpp"
#include "fpplab/rng.hpp"
#include "fpplab/weights.hpp"

namespace fpplab {

// ---- binomial building blocks -------------------------------------------

// P(Binomial(n,p) <= k).  Exact long-double summation for moderate n, the
// regularized incomplete beta identity beyond that.
double binomial_cdf(int64_t n, double p, int64_t k);

// Generalized inverse: smallest k with cdf(k) >= t, t in (0,1].
int64_t binomial_quantile(int64_t n, double p, double t);

// A Binomial(n,p) variable N written as a fair mixture of its lower and
// upper conditional halves: with F_n the binomial cdf and U uniform,
//   low  ~ F_n^{-1}(U) given U in (0,1/2],   high ~ F_n^{-1}(U) given U in [1/2,1),
// and N = coin ? high : low recovers the binomial law exactly.  high >= low
// holds pathwise because both halves are quantiles on opposite sides of 1/2.
struct SplitLaws {
  int64_t n = 0;
  double p = 0;
  std::vector<double> low_pmf;   // index k = 0..n
  std::vector<double> high_pmf;
  std::vector<double> mixture_pmf() const;  // (low + high)/2, the reconstruction
};

SplitLaws split_binomial(int64_t n, double p);

struct HalfPairDraw {
  int64_t low = 0;
  int64_t high = 0;
  bool coin = false;
  int64_t jump() const { return high - low; }
  int64_t value() const { return coin ? high : low; }
};

HalfPairDraw sample_half_pair(int64_t n, double p, Rng& rng);

// ---- shell system over a box --------------------------------------------

// The ambient box of radius base^levels carved into nested shells
// (level 1 = innermost box, level j = box j minus box j-1).  Optionally the
// universe is restricted to edges with both endpoints inside a cylinder; the
// leftover edges keep independent draws so the assembled law is unchanged.
class ShellSystem {
 public:
  ShellSystem(const Box& box, const ScaleParams& scale,
              const std::vector<uint8_t>* vertex_region = nullptr);

  const VertexIndexer& indexer() const { return idx_; }
  const ScaleParams& scale() const { return scale_; }
  int levels() const { return scale_.levels; }
  bool restricted() const { return restricted_; }

  // Edge slots of shell j inside the universe, ascending (deterministic order).
  const std::vector<int64_t>& shell_slots(int j) const { return slots_.at(static_cast<size_t>(j - 1)); }
  int64_t shell_size(int j) const { return static_cast<int64_t>(shell_slots(j).size()); }
  // Valid slots outside the universe (empty unless restricted).
  const std::vector<int64_t>& leftover_slots() const { return leftover_; }

  // Shell index of an edge slot, or 0 if outside the universe.
  int shell_of_slot(int64_t slot) const { return shell_index_[static_cast<size_t>(slot)]; }

 private:
  VertexIndexer idx_;
  ScaleParams scale_;
  bool restricted_ = false;
  std::vector<std::vector<int64_t>> slots_;
  std::vector<int64_t> leftover_;
  std::vector<int16_t> shell_index_;
};

// ---- the layered weight representation ----------------------------------

// Immutable bulk of one replicate: per-shell uniform orderings plus a (lo,
// hi) pair per edge (and a spare uniform for leftover edges).  Shared by all
// count vectors compared against each other.
struct CouplingBase {
  std::vector<std::vector<uint32_t>> rank;  // per shell: 0-based rank of each local edge
  std::vector<double> lo, hi;               // per edge slot
  std::vector<double> spare;                // per edge slot; only read for leftover edges
};

// One replicate: shared base plus the per-shell hi-mode edge counts.
struct CouplingSample {
  std::shared_ptr<const CouplingBase> base;
  std::vector<int64_t> counts;  // counts[j-1] = hi-mode edges in shell j
};

std::shared_ptr<const CouplingBase> sample_coupling_base(const ShellSystem& sys,
                                                         const Distribution& f, ModeThreshold cut,
                                                         uint64_t seed);

// counts[j-1] ~ Binomial(#shell j, 1 - cdf(cut)) via inverse-CDF draws.
std::vector<int64_t> sample_shell_counts(const ShellSystem& sys, double p_hi, uint64_t seed);

CouplingSample sample_coupling(const ShellSystem& sys, const Distribution& f, ModeThreshold cut,
                               uint64_t seed);

// Weight assembly: within shell j the N_j lowest-ranked edges take the hi
// value, the rest the lo value; leftover edges flip an independent p_hi coin.
// Marginally every edge is an exact draw from f, i.i.d. across edges.
WeightField assemble_field(const ShellSystem& sys, const CouplingSample& sample, double p_hi);

// Same sample with one shell count replaced (base shared, not copied).
CouplingSample with_count(const CouplingSample& sample, int j, int64_t new_count,
                          const ShellSystem& sys);

// ---- deviation-eligible shells ------------------------------------------

struct EligibleIndexSet {
  int j_lo = 0, j_hi = 0;            // scanned level range, inclusive
  std::vector<int> members;          // levels whose half-pair deviates both ways
};

// Levels j in the scan range whose half-pair draw satisfies
// low <= mu_j - sigma_j and high >= mu_j + sigma_j, where mu, sigma are the
// Binomial(#shell j, p_hi) moments.  The scan range is
// [ceil(0.25 L), floor(0.75 L)] with L = log_base |x|_inf, clamped to the
// shell ladder, or the single level floor(L) in cylinder mode.
EligibleIndexSet eligible_indices(const ShellSystem& sys, double p_hi, const Vertex& x,
                                  const std::vector<HalfPairDraw>& draws_by_level,
                                  bool top_level_only);

std::pair<int, int> deviation_scan_range(const ScaleParams& scale, const Vertex& x,
                                         bool top_level_only);

// ---- snapshot io ---------------------------------------------------------

void save_coupling_snapshot(const std::string& path, const ShellSystem& sys,
                            const CouplingSample& sample);
CouplingSample load_coupling_snapshot(const std::string& path, const ShellSystem& sys);

}  // namespace fpplab
