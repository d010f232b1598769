#include "fpplab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace fpplab {

namespace {

bool is_integral(double v) { return std::floor(v) == v; }

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

Distribution Distribution::exponential(double lambda) {
  if (!(lambda > 0)) throw std::invalid_argument("exponential rate must be positive");
  Distribution f;
  f.kind_ = Kind::Exponential;
  f.p1_ = lambda;
  return f;
}

Distribution Distribution::uniform(double a, double b) {
  if (!(a >= 0) || !(b > a)) throw std::invalid_argument("uniform support needs 0 <= a < b");
  Distribution f;
  f.kind_ = Kind::Uniform;
  f.p1_ = a;
  f.p2_ = b;
  return f;
}

Distribution Distribution::two_point(double v1, double p1, double v2) {
  if (!(v1 >= 0) || !(v2 > v1)) throw std::invalid_argument("two-point support needs 0 <= v1 < v2");
  if (!(p1 > 0 && p1 <= 1)) throw std::invalid_argument("two-point mass p1 must lie in (0,1]");
  Distribution f;
  f.kind_ = Kind::TwoPoint;
  f.values_ = {v1, v2};
  f.cum_ = {p1, 1.0};
  return f;
}

Distribution Distribution::table(std::vector<std::pair<double, double>> value_prob) {
  if (value_prob.empty()) throw std::invalid_argument("empty weight table");
  std::sort(value_prob.begin(), value_prob.end());
  Distribution f;
  f.kind_ = Kind::Table;
  double total = 0;
  for (auto& [v, p] : value_prob) {
    if (!(v >= 0)) throw std::invalid_argument("table weights must be nonnegative");
    if (!(p > 0)) throw std::invalid_argument("table masses must be positive");
    if (!f.values_.empty() && f.values_.back() == v) {
      total += p;
      f.cum_.back() = total;
      continue;
    }
    total += p;
    f.values_.push_back(v);
    f.cum_.push_back(total);
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("table masses must sum to 1");
  for (double& c : f.cum_) c /= total;
  f.cum_.back() = 1.0;
  return f;
}

Distribution Distribution::shifted_exponential(double shift, double lambda) {
  if (!(shift > 0)) throw std::invalid_argument("shift must be positive");
  if (!(lambda > 0)) throw std::invalid_argument("exponential rate must be positive");
  Distribution f;
  f.kind_ = Kind::ShiftedExponential;
  f.p1_ = lambda;
  f.p2_ = shift;
  return f;
}

Distribution Distribution::atom_exponential(double p0, double lambda) {
  if (!(p0 > 0 && p0 < 1)) throw std::invalid_argument("atom mass must lie in (0,1)");
  if (!(lambda > 0)) throw std::invalid_argument("exponential rate must be positive");
  Distribution f;
  f.kind_ = Kind::AtomExponential;
  f.p1_ = lambda;
  f.p2_ = p0;
  return f;
}

double Distribution::quantile(double q) const {
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("quantile argument must lie in (0,1]");
  switch (kind_) {
    case Kind::Exponential:
      return -std::log1p(-q) / p1_;
    case Kind::Uniform:
      return p1_ + q * (p2_ - p1_);
    case Kind::TwoPoint:
    case Kind::Table: {
      const auto it = std::lower_bound(cum_.begin(), cum_.end(), q);
      return values_[static_cast<size_t>(it - cum_.begin())];
    }
    case Kind::ShiftedExponential:
      return p2_ - std::log1p(-q) / p1_;
    case Kind::AtomExponential:
      if (q <= p2_) return 0.0;
      return -std::log1p(-(q - p2_) / (1.0 - p2_)) / p1_;
  }
  return 0;
}

double Distribution::cdf(double t) const {
  switch (kind_) {
    case Kind::Exponential:
      return t <= 0 ? 0.0 : -std::expm1(-p1_ * t);
    case Kind::Uniform:
      if (t < p1_) return 0.0;
      if (t >= p2_) return 1.0;
      return (t - p1_) / (p2_ - p1_);
    case Kind::TwoPoint:
    case Kind::Table: {
      // Mass of atoms <= t (right-continuous step function).
      const auto it = std::upper_bound(values_.begin(), values_.end(), t);
      if (it == values_.begin()) return 0.0;
      return cum_[static_cast<size_t>(it - values_.begin()) - 1];
    }
    case Kind::ShiftedExponential:
      return t <= p2_ ? 0.0 : -std::expm1(-p1_ * (t - p2_));
    case Kind::AtomExponential:
      if (t < 0) return 0.0;
      return p2_ + (1.0 - p2_) * (t <= 0 ? 0.0 : -std::expm1(-p1_ * t));
  }
  return 0;
}

double Distribution::infimum() const {
  switch (kind_) {
    case Kind::Exponential:
      return 0.0;
    case Kind::Uniform:
      return p1_;
    case Kind::TwoPoint:
    case Kind::Table:
      return values_.front();
    case Kind::ShiftedExponential:
      return p2_;
    case Kind::AtomExponential:
      return 0.0;
  }
  return 0;
}

double Distribution::atom_at_zero() const {
  switch (kind_) {
    case Kind::TwoPoint:
    case Kind::Table:
      return values_.front() == 0.0 ? cum_.front() : 0.0;
    case Kind::AtomExponential:
      return p2_;
    default:
      return 0.0;
  }
}

bool Distribution::integer_valued() const {
  if (kind_ != Kind::TwoPoint && kind_ != Kind::Table) return false;
  return std::all_of(values_.begin(), values_.end(), is_integral);
}

bool Distribution::degenerate() const {
  return cdf(infimum()) >= 1.0;
}

double Distribution::mean_below(double cut) const {
  const double Fc = cdf(cut);
  if (!(Fc > 0)) throw std::invalid_argument("mean_below needs positive mass at or below the cut");
  // E[t 1{t <= c}] / F(c), closed form per kind.  For Exponential(lambda),
  // the numerator is (1 - e^{-lc}(1 + lc)) / l.
  auto exp_part = [](double lambda, double c) {
    if (c <= 0) return 0.0;
    return (1.0 - std::exp(-lambda * c) * (1.0 + lambda * c)) / lambda;
  };
  switch (kind_) {
    case Kind::Exponential:
      return exp_part(p1_, cut) / Fc;
    case Kind::Uniform: {
      const double top = std::min(cut, p2_);
      return 0.5 * (p1_ + top);
    }
    case Kind::TwoPoint:
    case Kind::Table: {
      double acc = 0, prev = 0;
      for (size_t i = 0; i < values_.size() && values_[i] <= cut; ++i) {
        acc += values_[i] * (cum_[i] - prev);
        prev = cum_[i];
      }
      return acc / Fc;
    }
    case Kind::ShiftedExponential:
      return p2_ + exp_part(p1_, cut - p2_) / Fc;
    case Kind::AtomExponential:
      return (1.0 - p2_) * exp_part(p1_, cut) / Fc;
  }
  return 0;
}

std::string Distribution::describe() const {
  switch (kind_) {
    case Kind::Exponential:
      return "exponential(lambda=" + num(p1_) + ")";
    case Kind::Uniform:
      return "uniform[" + num(p1_) + "," + num(p2_) + "]";
    case Kind::TwoPoint:
      return "twopoint{" + num(values_[0]) + "@" + num(cum_[0]) + "," + num(values_[1]) + "}";
    case Kind::Table: {
      std::string s = "table{";
      double prev = 0;
      for (size_t i = 0; i < values_.size(); ++i) {
        if (i) s += ",";
        s += num(values_[i]) + "@" + num(cum_[i] - prev);
        prev = cum_[i];
      }
      return s + "}";
    }
    case Kind::ShiftedExponential:
      return "shifted-exponential(shift=" + num(p2_) + ",lambda=" + num(p1_) + ")";
    case Kind::AtomExponential:
      return "atom-exponential(p0=" + num(p2_) + ",lambda=" + num(p1_) + ")";
  }
  return "?";
}

ValidationReport validate_distribution(const Distribution& f) {
  ValidationReport r;
  const double mass0 = f.cdf(0.0);
  if (mass0 >= PercConstants::pc) {
    r.pass = false;
    r.failures.push_back("mass at zero " + num(mass0) + " >= bond-percolation critical value " +
                         num(PercConstants::pc) + "; zero-weight clusters percolate");
  } else if (PercConstants::pc - mass0 < 0.01) {
    r.warnings.push_back("mass at zero " + num(mass0) + " within 0.01 of the critical value " +
                         num(PercConstants::pc));
  }
  const double inf = f.infimum();
  if (inf > 0) {
    const double massI = f.cdf(inf);
    if (massI >= PercConstants::pcOriented) {
      r.pass = false;
      r.failures.push_back("mass at support minimum " + num(massI) +
                           " >= oriented-percolation critical value " + num(PercConstants::pcOriented) +
                           "; minimal-weight edges dominate geodesics");
    } else if (PercConstants::pcOriented - massI < 0.01) {
      r.warnings.push_back("mass at support minimum " + num(massI) + " within 0.01 of " +
                           num(PercConstants::pcOriented));
    }
  }
  return r;
}

ModeThreshold choose_threshold(const Distribution& f, double q) {
  if (!(q > 0 && q < 1)) throw std::invalid_argument("threshold quantile must lie in (0,1)");
  const double cut = f.quantile(q);
  const double Fc = f.cdf(cut);
  if (!(Fc > 0 && Fc < 1))
    throw std::invalid_argument("no lo/hi split at quantile " + num(q) + ": cdf(" + num(cut) +
                                ") = " + num(Fc));
  return ModeThreshold{cut};
}

std::pair<double, double> sample_pair(const Distribution& f, ModeThreshold cut, Rng& rng) {
  const double lo = sample_pair_lo(f, cut, rng.unit_open());
  const double hi = sample_pair_hi(f, cut, rng.unit_open());
  return {lo, hi};
}

}  // namespace fpplab
