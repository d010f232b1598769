#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fpplab/rng.hpp"

namespace fpplab {

// Critical probabilities the admissibility check compares against: bond
// percolation on the square lattice (atoms at the support minimum must stay
// subcritical) and its oriented variant (atom mass at zero).
struct PercConstants {
  static constexpr double pc = 0.5;
  static constexpr double pcOriented = 0.644;
};

// Edge-weight law.  Small closed catalog; every member samples by inverse
// CDF from a single uniform, which keeps keyed-field generation one hash per
// edge and makes conditional (lo/hi) sampling exact, atoms included.
class Distribution {
 public:
  enum class Kind { Exponential, Uniform, TwoPoint, Table, ShiftedExponential, AtomExponential };

  static Distribution exponential(double lambda);
  static Distribution uniform(double a, double b);
  static Distribution two_point(double v1, double p1, double v2);
  static Distribution table(std::vector<std::pair<double, double>> value_prob);
  static Distribution shifted_exponential(double shift, double lambda);
  // Atom at zero with mass p0, else Exponential(lambda).
  static Distribution atom_exponential(double p0, double lambda);

  Kind kind() const { return kind_; }

  // Generalized inverse CDF: quantile(q) = inf{ t : cdf(t) >= q }, q in (0,1].
  double quantile(double q) const;
  double cdf(double t) const;

  double infimum() const;            // essential infimum of the support
  double atom_at_zero() const;       // mass at t = 0
  bool integer_valued() const;       // all support points integral
  bool degenerate() const;           // single atom

  double sample(Rng& rng) const { return quantile(rng.unit_open()); }

  // E[t | t <= cut]; requires cdf(cut) > 0.
  double mean_below(double cut) const;

  std::string describe() const;

 private:
  Kind kind_ = Kind::Exponential;
  double p1_ = 0, p2_ = 0;                     // scalar parameters per kind
  std::vector<double> values_, cum_;           // table support and cumulative masses
};

struct ValidationReport {
  bool pass = true;
  std::vector<std::string> failures;
  std::vector<std::string> warnings;
};

// Admissibility of the law for the percolation-based machinery:
//   cdf(0) < pc, and when the support minimum I is positive, cdf(I) < pcOriented.
// Failure is reported, not thrown; callers decide whether to proceed.
ValidationReport validate_distribution(const Distribution& f);

// Cut between lo-mode (t <= value) and hi-mode (t > value) edges.
struct ModeThreshold {
  double value = 0;
};

// Threshold at the q-quantile (atoms resolved by the generalized inverse).
// Requires 0 < cdf(value) < 1; degenerate laws are rejected.
ModeThreshold choose_threshold(const Distribution& f, double q);

// One (lo, hi) pair: lo ~ f conditioned on t <= cut, hi ~ f conditioned on
// t > cut, independent.  The hi margin needs cdf(cut) < 1; the degenerate
// case cdf(cut) = 1 returns the top of the support (such pairs are never
// consumed because the hi-count is then almost surely zero).
std::pair<double, double> sample_pair(const Distribution& f, ModeThreshold cut, Rng& rng);

inline double sample_pair_lo(const Distribution& f, ModeThreshold cut, double u) {
  return f.quantile(u * f.cdf(cut.value));
}
inline double sample_pair_hi(const Distribution& f, ModeThreshold cut, double u) {
  const double Fc = f.cdf(cut.value);
  return f.quantile(Fc + u * (1.0 - Fc));
}

}  // namespace fpplab
