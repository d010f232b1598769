#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fpplab/coupling.hpp"
#include "fpplab/model.hpp"

namespace fpplab {

// ---- conditional clamped means -------------------------------------------

struct ConditionalMeanResult {
  double value = 0;  // mean over replicates of the clamped passage time
  double se = 0;
  int replicates = 0;
};

// Mean of clamp(T) given the per-shell count vector, Monte Carlo over the
// residual randomness (orderings + per-edge pairs).  Calls with equal
// (seed, salt) share those residual draws replicate-by-replicate.
ConditionalMeanResult estimate_conditional_mean(const StudyModel& model,
                                                const std::vector<int64_t>& counts,
                                                const TruncationWindow& window, int replicates,
                                                uint64_t seed, uint64_t salt, int workers);

// ---- centering search -----------------------------------------------------

struct TruncationSearch {
  TruncationWindow window;
  double median_estimate = 0;  // median over count draws of the clamped conditional mean
  double achieved_gap = 0;     // median_estimate - window midpoint at the returned a_low
  double tol_abs = 0;          // gap target, in absolute units
  int iterations = 0;
  bool converged = false;
};

// Place the clamp window so its midpoint matches the median (over count
// vectors) of the conditional clamped mean.  The whole outer x inner matrix
// of passage times is computed once; bisection then only re-clamps, so the
// search is deterministic and cheap.  When the budget runs out the best
// bracket midpoint is returned with converged = false.
TruncationSearch find_truncation(const StudyModel& model, int outer, int inner, double tol_frac,
                                 uint64_t seed, int workers, int max_iter = 80);

// ---- typicality of a count vector ----------------------------------------

struct GoodSetReport {
  std::vector<int64_t> counts;
  int replicates = 0;
  double xi = 0;
  double inner_freq = 0;           // clamped passage lands in the central half-window
  std::vector<int> levels;         // scanned shell levels
  std::vector<double> level_freq;  // min marked count in shell j >= base^{j-1}
  bool good = false;               // every frequency exceeds 1 - xi
};

GoodSetReport good_set_probe(const StudyModel& model, const std::vector<int64_t>& counts,
                             const TruncationWindow& window, double xi, int replicates,
                             uint64_t seed, uint64_t salt, int workers);

// ---- count-lowering flips -------------------------------------------------

struct FlipReport {
  int level = 0;
  int64_t count_from = 0, count_to = 0;
  int replicates = 0;
  double mean_delta = 0, se_delta = 0;  // clamp(T at larger count) - clamp(T at smaller)
  int64_t negatives = 0;                // replicates where the delta is negative
  double hit_freq = 0;       // optimal path of the smaller-count field uses a flipped edge
  double hit_mean = 0;       // first and second moments of the flipped-edge
  double hit_second = 0;     // count along that optimal path
};

// Pathwise effect of lowering one shell count with everything else held
// fixed.  Weights can only drop, so each delta should be nonnegative.  A
// strictly positive delta forces every optimal path of the lowered field
// through a flipped edge, so the hit statistics are read off that path.
FlipReport flip_probe(const StudyModel& model, const std::vector<int64_t>& counts, int level,
                      int64_t new_count, const TruncationWindow& window, int replicates,
                      uint64_t seed, uint64_t salt, int workers);

// ---- antichain extraction -------------------------------------------------

enum class Verdict { Pass, Fail, Inconclusive };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    default: return "inconclusive";
  }
}

struct AssignmentRow {
  uint32_t bits = 0;       // coordinate i set = eligible level i takes its high draw
  double estimate = 0, se = 0;
  bool good = false;
  bool in_band = false;    // estimate in [r, r + epsilon]
};

struct GapRow {
  uint32_t upper = 0, lower = 0;  // assignments differing in one coordinate
  int position = 0;               // which eligible coordinate was dropped
  double gap = 0, se = 0;         // paired estimate difference, upper - lower
};

struct AntichainReport {
  uint64_t attempt_used = 0;
  std::vector<int> eligible;            // shell levels, ascending
  std::vector<HalfPairDraw> draws;      // one per shell level (index j-1)
  std::vector<AssignmentRow> rows;      // all 2^k assignments
  std::vector<uint32_t> selected;       // bits of assignments in the extracted family
  bool antichain_ok = false;
  double density = 0;                   // |selected| / 2^k
  double density_bound = 0;             // 8 / sqrt(k)
  uint64_t max_antichain = 0;           // binomial(k, floor(k/2))
  std::vector<GapRow> gaps;             // one-coordinate drops out of selected rows
  double band_lo = 0, band_hi = 0, epsilon = 0;
  Verdict verdict = Verdict::Inconclusive;
  std::string note;
};

struct AntichainOptions {
  int min_eligible = 1;
  int max_eligible = 12;
  int max_attempts = 100;
};

// Draw conditional half-pairs per shell until some scanned levels deviate a
// full standard deviation both ways, evaluate the clamped conditional mean
// for every low/high assignment over those levels (common residual draws),
// and keep the assignments whose estimate is typical and lands in the target
// band.  The kept family should be an antichain: dropping any high draw to
// its paired low moves the estimate by more than the band width.  Gaps
// within three standard errors of the band width make the verdict
// inconclusive rather than a pass or fail.
AntichainReport antichain_extract(const StudyModel& model, const TruncationWindow& window,
                                  double r_lo, double epsilon, double xi, int inner, uint64_t seed,
                                  int workers, const AntichainOptions& opts = {});

// ---- small-ball frequency scan -------------------------------------------

struct SmallBallRow {
  double r = 0;
  double freq = 0;  // count draws whose estimate is typical and in [r, r + epsilon]
};

struct SmallBallReport {
  int outer = 0, inner = 0;
  double epsilon = 0, xi = 0;
  std::vector<SmallBallRow> rows;  // r walks the central half-window in eps/2 steps
  double sup_freq = 0;
};

SmallBallReport small_ball_scan(const StudyModel& model, const TruncationWindow& window,
                                double epsilon, double xi, int outer, int inner, uint64_t seed,
                                int workers);

// ---- fluctuation growth scans --------------------------------------------

struct ScanRow {
  int64_t n = 0;
  int samples = 0;
  double mean_t = 0, var_t = 0;
  double iqr = 0, q20 = 0, q80 = 0;
  double norm_root_log = 0;  // iqr / sqrt(log |x|), zero at |x| = 1
  double norm_power = 0;     // iqr / |x|^{(1 - alpha (d-1))/2}
  double boundary_frac = 0;  // optimal paths that met the box boundary
};

struct ScanPoint {
  ScanRow row;
  std::vector<double> samples;    // passage times, replicate order
  std::vector<uint8_t> boundary;  // per replicate
};

struct ScanOptions {
  int dims = 2;
  Vertex direction = Vertex::of({1, 0});
  bool cylinder = false;
  double alpha = 0.25;
  double pad = 1.5;
};

// Direct passage-time samples at each distance in n_list, with spread
// statistics normalized against the candidate growth laws.  Fields are keyed
// per edge, so plane and cylinder scans under one seed share every weight.
std::vector<ScanPoint> fluctuation_scan(const Distribution& f, const std::vector<int64_t>& n_list,
                                        int replicates, const ScanOptions& opt, uint64_t seed,
                                        int workers);

// ---- two-sided tail reckoning --------------------------------------------

struct ReckoningRow {
  double c = 0;
  double freq_low = 0, freq_high = 0;  // T at least c * width below / above the midpoint
  bool certified = false;              // both tail frequencies reach c
};

struct ReckoningReport {
  int samples = 0;
  double mid = 0, width = 0;
  std::vector<ReckoningRow> rows;
  double certified_c = 0;  // largest certified grid value (0 if none)
};

ReckoningReport reckoning_check(const StudyModel& model, const TruncationWindow& window,
                                const std::vector<double>& c_grid, int replicates, uint64_t seed,
                                int workers);

// ---- marginal-law comparison ---------------------------------------------

struct LawComparison {
  int samples = 0;      // per arm
  double ks = 0;        // two-sample Kolmogorov-Smirnov statistic
  double critical = 0;  // rejection threshold at the given level
  double level = 0;
  bool pass = false;
};

// Passage times from freshly assembled layered fields against passage times
// from directly sampled i.i.d. fields on the same box: the layered
// representation must be invisible to any marginal statistic.
LawComparison coupled_vs_direct_ks(const StudyModel& model, int samples, uint64_t seed,
                                   int workers, double level = 0.01);

}  // namespace fpplab
