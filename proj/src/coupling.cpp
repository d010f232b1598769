#include "fpplab/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>

namespace fpplab {

namespace {

// Exact-enough cdf by cumulative pmf recurrence; long double keeps absolute
// error far below 1e-15 for n up to a few thousand.
double cdf_by_summation(int64_t n, double p, int64_t k) {
  const long double lp = p, lq = 1.0L - lp;
  long double pmf = powl(lq, static_cast<long double>(n));
  long double acc = pmf;
  for (int64_t i = 0; i < k; ++i) {
    pmf *= lp * static_cast<long double>(n - i) / (lq * static_cast<long double>(i + 1));
    acc += pmf;
  }
  return static_cast<double>(std::min(acc, 1.0L));
}

constexpr int64_t kSummationLimit = 4096;

}  // namespace

double binomial_cdf(int64_t n, double p, int64_t k) {
  if (n < 0) throw std::invalid_argument("binomial cdf needs n >= 0");
  if (!(p > 0 && p < 1)) throw std::invalid_argument("binomial cdf needs p in (0,1)");
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  if (n <= kSummationLimit) return cdf_by_summation(n, p, k);
  // P(X <= k) = I_{1-p}(n-k, k+1)
  return boost::math::ibeta(static_cast<double>(n - k), static_cast<double>(k + 1), 1.0 - p);
}

int64_t binomial_quantile(int64_t n, double p, double t) {
  if (!(t > 0 && t <= 1)) throw std::invalid_argument("binomial quantile needs t in (0,1]");
  if (n < 0) throw std::invalid_argument("binomial quantile needs n >= 0");
  if (n == 0) return 0;
  if (t >= 1.0) return n;  // cdf(k) < 1 for every k < n when p is interior
  int64_t lo = 0, hi = n;
  while (lo < hi) {
    const int64_t mid = lo + (hi - lo) / 2;
    if (binomial_cdf(n, p, mid) >= t)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

std::vector<double> SplitLaws::mixture_pmf() const {
  std::vector<double> m(low_pmf.size());
  for (size_t i = 0; i < m.size(); ++i) m[i] = 0.5 * (low_pmf[i] + high_pmf[i]);
  return m;
}

SplitLaws split_binomial(int64_t n, double p) {
  if (n < 0 || n > kSummationLimit)
    throw std::invalid_argument("split laws are materialized only for n <= 4096");
  if (!(p > 0 && p < 1)) throw std::invalid_argument("split needs p in (0,1)");
  SplitLaws s;
  s.n = n;
  s.p = p;
  s.low_pmf.assign(static_cast<size_t>(n) + 1, 0.0);
  s.high_pmf.assign(static_cast<size_t>(n) + 1, 0.0);
  // The value k is hit by the quantile exactly on the cdf gap (F(k-1), F(k)];
  // conditioning on the lower/upper uniform half doubles the overlap of that
  // gap with (0,1/2] resp. [1/2,1).
  const long double lp = p, lq = 1.0L - lp;
  long double pmf = powl(lq, static_cast<long double>(n));
  long double Fprev = 0.0L, F = pmf;
  for (int64_t k = 0; k <= n; ++k) {
    const long double lo_gap = std::min(F, 0.5L) - std::min(Fprev, 0.5L);
    const long double hi_gap = std::max(F, 0.5L) - std::max(Fprev, 0.5L);
    s.low_pmf[static_cast<size_t>(k)] = static_cast<double>(2.0L * lo_gap);
    s.high_pmf[static_cast<size_t>(k)] = static_cast<double>(2.0L * hi_gap);
    if (k < n) {
      pmf *= lp * static_cast<long double>(n - k) / (lq * static_cast<long double>(k + 1));
      Fprev = F;
      F = std::min(F + pmf, 1.0L);
      if (k == n - 1) F = 1.0L;
    }
  }
  return s;
}

HalfPairDraw sample_half_pair(int64_t n, double p, Rng& rng) {
  HalfPairDraw d;
  const double u_low = 0.5 * (1.0 - rng.unit_halfopen());   // (0, 1/2]
  const double u_high = 0.5 * (1.0 + rng.unit_halfopen());  // [1/2, 1)
  d.low = binomial_quantile(n, p, u_low);
  d.high = binomial_quantile(n, p, u_high);
  d.coin = rng.coin();
  return d;
}

ShellSystem::ShellSystem(const Box& box, const ScaleParams& scale,
                         const std::vector<uint8_t>* vertex_region)
    : idx_(box), scale_(scale), restricted_(vertex_region != nullptr) {
  scale_.check();
  const int d = box.dims();
  for (int i = 0; i < d; ++i) {
    if (box.lo.c[i] != -scale_.radius(scale_.levels) || box.hi.c[i] != scale_.radius(scale_.levels))
      throw std::invalid_argument("shell system needs the centered box of radius base^levels");
  }
  if (vertex_region && static_cast<int64_t>(vertex_region->size()) != idx_.vertex_count())
    throw std::invalid_argument("vertex region mask does not match the box");

  slots_.assign(static_cast<size_t>(scale_.levels), {});
  shell_index_.assign(static_cast<size_t>(idx_.edge_slot_count()), 0);
  for (int64_t s = 0; s < idx_.edge_slot_count(); ++s) {
    if (!idx_.slot_valid(s)) continue;
    const auto [u, v] = idx_.slot_endpoints(s);
    if (vertex_region && !((*vertex_region)[static_cast<size_t>(u)] &&
                           (*vertex_region)[static_cast<size_t>(v)])) {
      leftover_.push_back(s);
      continue;
    }
    const int j = shell_of_edge(scale_, idx_.vertex(u), idx_.vertex(v));
    slots_[static_cast<size_t>(j - 1)].push_back(s);
    shell_index_[static_cast<size_t>(s)] = static_cast<int16_t>(j);
  }
}

std::shared_ptr<const CouplingBase> sample_coupling_base(const ShellSystem& sys,
                                                         const Distribution& f, ModeThreshold cut,
                                                         uint64_t seed) {
  auto base = std::make_shared<CouplingBase>();
  base->rank.resize(static_cast<size_t>(sys.levels()));
  for (int j = 1; j <= sys.levels(); ++j) {
    const int64_t m = sys.shell_size(j);
    auto& rank = base->rank[static_cast<size_t>(j - 1)];
    rank.resize(static_cast<size_t>(m));
    // Fisher-Yates permutation of local edge positions; rank[e] is the slot
    // edge e occupies in the uniform ordering of the shell.
    std::vector<uint32_t> pos(static_cast<size_t>(m));
    for (int64_t i = 0; i < m; ++i) pos[static_cast<size_t>(i)] = static_cast<uint32_t>(i);
    Rng rng(derive_seed(seed, Tag::CouplingRanks, {static_cast<uint64_t>(j)}));
    for (int64_t i = m - 1; i > 0; --i)
      std::swap(pos[static_cast<size_t>(i)], pos[static_cast<size_t>(rng.below(i + 1))]);
    for (int64_t i = 0; i < m; ++i) rank[pos[static_cast<size_t>(i)]] = static_cast<uint32_t>(i);
  }

  const int64_t slots = sys.indexer().edge_slot_count();
  base->lo.assign(static_cast<size_t>(slots), 0.0);
  base->hi.assign(static_cast<size_t>(slots), 0.0);
  if (sys.restricted()) base->spare.assign(static_cast<size_t>(slots), 0.0);
  Rng rng(derive_seed(seed, Tag::CouplingPairs));
  for (int64_t s = 0; s < slots; ++s) {
    if (!sys.indexer().slot_valid(s)) continue;
    base->lo[static_cast<size_t>(s)] = sample_pair_lo(f, cut, rng.unit_open());
    base->hi[static_cast<size_t>(s)] = sample_pair_hi(f, cut, rng.unit_open());
    if (sys.restricted()) base->spare[static_cast<size_t>(s)] = rng.unit_halfopen();
  }
  return base;
}

std::vector<int64_t> sample_shell_counts(const ShellSystem& sys, double p_hi, uint64_t seed) {
  std::vector<int64_t> counts(static_cast<size_t>(sys.levels()), 0);
  Rng rng(derive_seed(seed, Tag::CouplingCounts));
  for (int j = 1; j <= sys.levels(); ++j) {
    const int64_t m = sys.shell_size(j);
    const double u = rng.unit_open();  // always consume: stream layout is fixed
    if (m == 0 || p_hi <= 0)
      counts[static_cast<size_t>(j - 1)] = 0;
    else if (p_hi >= 1)
      counts[static_cast<size_t>(j - 1)] = m;
    else
      counts[static_cast<size_t>(j - 1)] = binomial_quantile(m, p_hi, u);
  }
  return counts;
}

CouplingSample sample_coupling(const ShellSystem& sys, const Distribution& f, ModeThreshold cut,
                               uint64_t seed) {
  CouplingSample sample;
  sample.base = sample_coupling_base(sys, f, cut, seed);
  sample.counts = sample_shell_counts(sys, 1.0 - f.cdf(cut.value), seed);
  return sample;
}

WeightField assemble_field(const ShellSystem& sys, const CouplingSample& sample, double p_hi) {
  const CouplingBase& base = *sample.base;
  if (static_cast<int>(sample.counts.size()) != sys.levels())
    throw std::invalid_argument("count vector does not match the shell ladder");
  WeightField field(sys.indexer().box());
  for (int j = 1; j <= sys.levels(); ++j) {
    const auto& slots = sys.shell_slots(j);
    const auto& rank = base.rank[static_cast<size_t>(j - 1)];
    const int64_t n_hi = sample.counts[static_cast<size_t>(j - 1)];
    if (n_hi < 0 || n_hi > static_cast<int64_t>(slots.size()))
      throw std::invalid_argument("shell count outside [0, #shell]");
    for (size_t i = 0; i < slots.size(); ++i) {
      const auto s = static_cast<size_t>(slots[i]);
      field.w[s] = rank[i] < n_hi ? base.hi[s] : base.lo[s];
    }
  }
  for (int64_t slot : sys.leftover_slots()) {
    const auto s = static_cast<size_t>(slot);
    field.w[s] = base.spare[s] < p_hi ? base.hi[s] : base.lo[s];
  }
  return field;
}

CouplingSample with_count(const CouplingSample& sample, int j, int64_t new_count,
                          const ShellSystem& sys) {
  if (j < 1 || j > sys.levels()) throw std::out_of_range("shell level out of range");
  if (new_count < 0 || new_count > sys.shell_size(j))
    throw std::invalid_argument("replacement count outside [0, #shell]");
  CouplingSample out;
  out.base = sample.base;
  out.counts = sample.counts;
  out.counts[static_cast<size_t>(j - 1)] = new_count;
  return out;
}

std::pair<int, int> deviation_scan_range(const ScaleParams& scale, const Vertex& x,
                                         bool top_level_only) {
  const int32_t m = x.norm_inf();
  if (m < 1) throw std::invalid_argument("scan range undefined at the origin");
  if (top_level_only) {
    const int k0 = std::min(scale_index(scale, x), scale.levels);
    const int k = std::max(k0, 1);
    return {k, k};
  }
  // log_base |x|_inf, snapped to integers to keep boundary cases exact.
  double L = std::log(static_cast<double>(m)) / std::log(static_cast<double>(scale.base));
  if (std::abs(L - std::round(L)) < 1e-9) L = std::round(L);
  int lo = static_cast<int>(std::ceil(0.25 * L - 1e-12));
  int hi = static_cast<int>(std::floor(0.75 * L + 1e-12));
  lo = std::max(lo, 1);
  hi = std::min(hi, scale.levels);
  return {lo, hi};
}

EligibleIndexSet eligible_indices(const ShellSystem& sys, double p_hi, const Vertex& x,
                                  const std::vector<HalfPairDraw>& draws_by_level,
                                  bool top_level_only) {
  if (static_cast<int>(draws_by_level.size()) != sys.levels())
    throw std::invalid_argument("need one half-pair draw per shell level");
  EligibleIndexSet out;
  const auto [lo, hi] = deviation_scan_range(sys.scale(), x, top_level_only);
  out.j_lo = lo;
  out.j_hi = hi;
  for (int j = lo; j <= hi; ++j) {
    const double n = static_cast<double>(sys.shell_size(j));
    if (n == 0) continue;
    const double mu = n * p_hi;
    const double sigma = std::sqrt(n * p_hi * (1.0 - p_hi));
    if (sigma <= 0) continue;
    const HalfPairDraw& d = draws_by_level[static_cast<size_t>(j - 1)];
    if (static_cast<double>(d.low) <= mu - sigma && static_cast<double>(d.high) >= mu + sigma)
      out.members.push_back(j);
  }
  return out;
}

// ---- snapshot io ---------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'L', 'W', 'R', '1'};  // layered weight representation, v1

template <typename T>
void put(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <typename T>
void get(std::ifstream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof v);
}

template <typename T>
void put_vec(std::ofstream& os, const std::vector<T>& v) {
  put(os, static_cast<uint64_t>(v.size()));
  os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}
template <typename T>
void get_vec(std::ifstream& is, std::vector<T>& v) {
  uint64_t n = 0;
  get(is, n);
  v.resize(n);
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
}

}  // namespace

void save_coupling_snapshot(const std::string& path, const ShellSystem& sys,
                            const CouplingSample& sample) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open snapshot file for writing: " + path);
  os.write(kMagic, 4);
  put(os, static_cast<int32_t>(sys.indexer().dims()));
  put(os, static_cast<int64_t>(sys.scale().base));
  put(os, static_cast<int32_t>(sys.scale().levels));
  put(os, static_cast<uint8_t>(sys.restricted() ? 1 : 0));
  put_vec(os, sample.counts);
  for (const auto& r : sample.base->rank) put_vec(os, r);
  put_vec(os, sample.base->lo);
  put_vec(os, sample.base->hi);
  put_vec(os, sample.base->spare);
  if (!os) throw std::runtime_error("snapshot write failed: " + path);
}

CouplingSample load_coupling_snapshot(const std::string& path, const ShellSystem& sys) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open snapshot file: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("snapshot header mismatch: " + path);
  int32_t dims = 0, levels = 0;
  int64_t base_factor = 0;
  uint8_t restricted = 0;
  get(is, dims);
  get(is, base_factor);
  get(is, levels);
  get(is, restricted);
  if (dims != sys.indexer().dims() || base_factor != sys.scale().base ||
      levels != sys.scale().levels || (restricted != 0) != sys.restricted())
    throw std::runtime_error("snapshot geometry does not match the shell system");
  CouplingSample sample;
  auto base = std::make_shared<CouplingBase>();
  get_vec(is, sample.counts);
  base->rank.resize(static_cast<size_t>(levels));
  for (auto& r : base->rank) get_vec(is, r);
  get_vec(is, base->lo);
  get_vec(is, base->hi);
  get_vec(is, base->spare);
  if (!is) throw std::runtime_error("snapshot truncated: " + path);
  if (static_cast<int>(sample.counts.size()) != sys.levels())
    throw std::runtime_error("snapshot count vector does not match the shell ladder");
  for (int j = 1; j <= sys.levels(); ++j)
    if (static_cast<int64_t>(base->rank[static_cast<size_t>(j - 1)].size()) != sys.shell_size(j))
      throw std::runtime_error("snapshot ordering does not match the shell sizes");
  sample.base = std::move(base);
  return sample;
}

}  // namespace fpplab
