#include "fpplab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>

#include "fpplab/antichain.hpp"
#include "fpplab/parallel.hpp"
#include "fpplab/paths.hpp"
#include "fpplab/stats.hpp"

namespace fpplab {

namespace {

// One lazily built engine per worker: the Dijkstra workspace is reusable
// across replicates but not across threads.
class EnginePool {
 public:
  EnginePool(const VertexIndexer& idx, int workers)
      : idx_(&idx), engines_(static_cast<size_t>(std::max(1, workers))) {}
  PathEngine& at(int worker) {
    auto& e = engines_[static_cast<size_t>(worker)];
    if (!e) e = std::make_unique<PathEngine>(*idx_);
    return *e;
  }

 private:
  const VertexIndexer* idx_;
  std::vector<std::unique_ptr<PathEngine>> engines_;
};

double freq(const std::vector<uint8_t>& flags, size_t begin, size_t count) {
  int64_t hits = 0;
  for (size_t i = begin; i < begin + count; ++i) hits += flags[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(count);
}

}  // namespace

ConditionalMeanResult estimate_conditional_mean(const StudyModel& model,
                                                const std::vector<int64_t>& counts,
                                                const TruncationWindow& window, int replicates,
                                                uint64_t seed, uint64_t salt, int workers) {
  if (replicates < 2) throw std::invalid_argument("need at least two replicates");
  std::vector<double> clamped(static_cast<size_t>(replicates));
  EnginePool pool(model.indexer(), workers);
  parallel_run(replicates, workers, [&](int w, int64_t r) {
    CouplingSample sample{model.base_for(seed, salt, r), counts};
    const WeightField field = model.assemble(sample);
    const double t = model.passage(field, pool.at(w));
    clamped[static_cast<size_t>(r)] = window.clamp(t);
  });
  ConditionalMeanResult res;
  res.value = mean(clamped);
  res.se = stderr_of_mean(clamped);
  res.replicates = replicates;
  return res;
}

TruncationSearch find_truncation(const StudyModel& model, int outer, int inner, double tol_frac,
                                 uint64_t seed, int workers, int max_iter) {
  if (outer < 3 || inner < 2) throw std::invalid_argument("centering needs outer >= 3, inner >= 2");
  if (!(tol_frac > 0)) throw std::invalid_argument("tolerance fraction must be positive");

  // The clamp position is the only moving part, so all passage times are
  // computed once up front and every bisection step just re-clamps them.
  const int64_t total = static_cast<int64_t>(outer) * inner;
  std::vector<double> tmat(static_cast<size_t>(total));
  EnginePool pool(model.indexer(), workers);
  parallel_run(total, workers, [&](int w, int64_t item) {
    const int64_t o = item / inner, i = item % inner;
    CouplingSample sample{model.base_for(seed, 0, i), model.counts_for(seed, o)};
    const WeightField field = model.assemble(sample);
    tmat[static_cast<size_t>(item)] = model.passage(field, pool.at(w));
  });

  const double width = model.window_width();
  TruncationSearch out;
  out.window.width = width;
  out.tol_abs = tol_frac * width;

  std::vector<double> means(static_cast<size_t>(outer));
  auto center_gap = [&](double a_low) {
    const TruncationWindow win{a_low, width};
    for (int o = 0; o < outer; ++o) {
      double s = 0;
      for (int i = 0; i < inner; ++i)
        s += win.clamp(tmat[static_cast<size_t>(o) * inner + static_cast<size_t>(i)]);
      means[static_cast<size_t>(o)] = s / inner;
    }
    std::sort(means.begin(), means.end());
    return quantile_sorted(means, 0.5) - win.mid();
  };

  if (width <= 0) {
    // Degenerate window: clamping pins every value, so center on the plain
    // median of the conditional means instead.
    for (int o = 0; o < outer; ++o) {
      double s = 0;
      for (int i = 0; i < inner; ++i)
        s += tmat[static_cast<size_t>(o) * inner + static_cast<size_t>(i)];
      means[static_cast<size_t>(o)] = s / inner;
    }
    std::sort(means.begin(), means.end());
    out.window.a_low = quantile_sorted(means, 0.5);
    out.median_estimate = out.window.a_low;
    out.converged = true;
    return out;
  }

  const auto [t_min, t_max] = std::minmax_element(tmat.begin(), tmat.end());
  double lo = *t_min - width;  // gap is +width/2 here
  double hi = *t_max;          // gap is -width/2 here
  double best = lo, best_gap = center_gap(lo);
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g = center_gap(mid);
    out.iterations = it + 1;
    if (std::abs(g) < std::abs(best_gap)) {
      best = mid;
      best_gap = g;
    }
    if (std::abs(g) <= out.tol_abs) {
      out.converged = true;
      break;
    }
    // The gap is nonincreasing in the window position.
    if (g > 0)
      lo = mid;
    else
      hi = mid;
  }
  out.window.a_low = best;
  out.achieved_gap = best_gap;
  out.median_estimate = best_gap + out.window.mid();
  return out;
}

GoodSetReport good_set_probe(const StudyModel& model, const std::vector<int64_t>& counts,
                             const TruncationWindow& window, double xi, int replicates,
                             uint64_t seed, uint64_t salt, int workers) {
  if (replicates < 1) throw std::invalid_argument("need at least one replicate");
  if (!(xi > 0 && xi < 1)) throw std::invalid_argument("exceptional mass must lie in (0,1)");
  const auto [j_lo, j_hi] = model.scan_range();
  const int n_levels = std::max(0, j_hi - j_lo + 1);

  std::vector<uint8_t> ok_inner(static_cast<size_t>(replicates), 0);
  std::vector<uint8_t> ok_level(static_cast<size_t>(replicates) * static_cast<size_t>(n_levels), 0);
  EnginePool pool(model.indexer(), workers);
  parallel_run(replicates, workers, [&](int w, int64_t r) {
    CouplingSample sample{model.base_for(seed, salt, r), counts};
    const WeightField field = model.assemble(sample);
    PathEngine& engine = pool.at(w);
    PassageOptions opt;
    opt.want_union = n_levels > 0;
    const GeodesicReport rep = model.full_query(field, engine, opt);
    ok_inner[static_cast<size_t>(r)] = window.inner_contains(window.clamp(rep.time)) ? 1 : 0;
    for (int k = 0; k < n_levels; ++k) {
      const int j = j_lo + k;
      const int64_t cnt = engine.marked_count_cached(field, model.cut(), &model.shell_edge_mask(j),
                                                     rep, model.tie_tol());
      const int64_t need = model.shells().scale().radius(j - 1);
      ok_level[static_cast<size_t>(r) * n_levels + static_cast<size_t>(k)] = cnt >= need ? 1 : 0;
    }
  });

  GoodSetReport out;
  out.counts = counts;
  out.replicates = replicates;
  out.xi = xi;
  out.inner_freq = freq(ok_inner, 0, ok_inner.size());
  out.good = out.inner_freq > 1.0 - xi;
  for (int k = 0; k < n_levels; ++k) {
    int64_t hits = 0;
    for (int r = 0; r < replicates; ++r)
      hits += ok_level[static_cast<size_t>(r) * n_levels + static_cast<size_t>(k)];
    const double f = static_cast<double>(hits) / replicates;
    out.levels.push_back(j_lo + k);
    out.level_freq.push_back(f);
    out.good = out.good && f > 1.0 - xi;
  }
  return out;
}

FlipReport flip_probe(const StudyModel& model, const std::vector<int64_t>& counts, int level,
                      int64_t new_count, const TruncationWindow& window, int replicates,
                      uint64_t seed, uint64_t salt, int workers) {
  if (replicates < 2) throw std::invalid_argument("need at least two replicates");
  if (level < 1 || level > model.shells().levels())
    throw std::out_of_range("flip level outside the shell ladder");
  if (static_cast<int>(counts.size()) != model.shells().levels())
    throw std::invalid_argument("count vector does not match the shell ladder");
  const int64_t shell_n = model.shells().shell_size(level);
  if (new_count < 0 || new_count > shell_n)
    throw std::invalid_argument("replacement count outside [0, #shell]");

  const int64_t c_hi = std::max(counts[static_cast<size_t>(level - 1)], new_count);
  const int64_t c_lo = std::min(counts[static_cast<size_t>(level - 1)], new_count);

  std::vector<double> delta(static_cast<size_t>(replicates));
  std::vector<uint8_t> hit(static_cast<size_t>(replicates), 0);
  std::vector<double> hits_on_path(static_cast<size_t>(replicates), 0);
  EnginePool pool(model.indexer(), workers);
  const auto& slots = model.shells().shell_slots(level);

  parallel_run(replicates, workers, [&](int w, int64_t r) {
    auto base = model.base_for(seed, salt, r);
    CouplingSample high{base, counts};
    high.counts[static_cast<size_t>(level - 1)] = c_hi;
    const CouplingSample low = with_count(high, level, c_lo, model.shells());
    const WeightField f_hi = model.assemble(high);
    const WeightField f_lo = model.assemble(low);

    PathEngine& engine = pool.at(w);
    // The lowered field's optimal path: a strict drop in passage time is
    // impossible without it crossing a flipped edge.
    const GeodesicReport rep_lo = model.full_query(f_lo, engine, {});
    const double t_hi = model.passage(f_hi, engine);
    delta[static_cast<size_t>(r)] = window.clamp(t_hi) - window.clamp(rep_lo.time);

    // Flipped slots: ranks moved between the two counts.
    const auto& rank = base->rank[static_cast<size_t>(level - 1)];
    std::vector<int64_t> flipped;
    for (size_t i = 0; i < slots.size(); ++i)
      if (rank[i] >= c_lo && rank[i] < c_hi) flipped.push_back(slots[i]);
    std::sort(flipped.begin(), flipped.end());
    int64_t on_path = 0;
    for (int64_t s : rep_lo.witness)
      on_path += std::binary_search(flipped.begin(), flipped.end(), s) ? 1 : 0;
    hit[static_cast<size_t>(r)] = on_path > 0 ? 1 : 0;
    hits_on_path[static_cast<size_t>(r)] = static_cast<double>(on_path);
  });

  FlipReport out;
  out.level = level;
  out.count_from = c_hi;
  out.count_to = c_lo;
  out.replicates = replicates;
  out.mean_delta = mean(delta);
  out.se_delta = stderr_of_mean(delta);
  out.negatives = static_cast<int64_t>(std::count_if(delta.begin(), delta.end(),
                                                     [](double d) { return d < 0; }));
  out.hit_freq = freq(hit, 0, hit.size());
  out.hit_mean = mean(hits_on_path);
  double second = 0;
  for (double h : hits_on_path) second += h * h;
  out.hit_second = second / static_cast<double>(replicates);
  return out;
}

AntichainReport antichain_extract(const StudyModel& model, const TruncationWindow& window,
                                  double r_lo, double epsilon, double xi, int inner, uint64_t seed,
                                  int workers, const AntichainOptions& opts) {
  if (inner < 2) throw std::invalid_argument("need at least two inner replicates");
  if (!(epsilon > 0)) throw std::invalid_argument("band width must be positive");
  if (!(xi > 0 && xi < 1)) throw std::invalid_argument("exceptional mass must lie in (0,1)");
  if (opts.min_eligible < 1 || opts.max_eligible < opts.min_eligible ||
      opts.max_eligible > 20 || opts.max_attempts < 1)
    throw std::invalid_argument("bad eligibility bounds");

  const int levels = model.shells().levels();
  AntichainReport out;
  out.epsilon = epsilon;
  out.band_lo = r_lo;
  out.band_hi = r_lo + epsilon;

  std::vector<int> eligible;
  std::vector<HalfPairDraw> draws;
  bool found = false;
  for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
    draws.clear();
    for (int j = 1; j <= levels; ++j)
      draws.push_back(model.half_pair_for(j, seed, static_cast<uint64_t>(attempt)));
    const EligibleIndexSet set = eligible_indices(model.shells(), model.p_hi(), model.target(),
                                                  draws, model.cylinder());
    const int k = static_cast<int>(set.members.size());
    if (k >= opts.min_eligible && k <= opts.max_eligible) {
      eligible = set.members;
      out.attempt_used = static_cast<uint64_t>(attempt);
      found = true;
      break;
    }
  }
  if (!found)
    throw std::runtime_error("no half-pair draw produced an eligible deviation set in budget");
  out.eligible = eligible;
  out.draws = draws;

  const int k = static_cast<int>(eligible.size());
  const uint32_t n_assign = 1u << k;
  const auto [j_lo, j_hi] = model.scan_range();
  const int n_levels = std::max(0, j_hi - j_lo + 1);

  std::vector<int64_t> base_counts(static_cast<size_t>(levels));
  for (int j = 1; j <= levels; ++j)
    base_counts[static_cast<size_t>(j - 1)] = draws[static_cast<size_t>(j - 1)].value();
  std::vector<std::vector<int64_t>> counts_of(n_assign, base_counts);
  for (uint32_t m = 0; m < n_assign; ++m)
    for (int i = 0; i < k; ++i) {
      const auto& d = draws[static_cast<size_t>(eligible[static_cast<size_t>(i)] - 1)];
      counts_of[m][static_cast<size_t>(eligible[static_cast<size_t>(i)] - 1)] =
          (m >> i) & 1u ? d.high : d.low;
    }

  // Estimate every assignment over common residual randomness; the good-set
  // statistics ride along on the same searches.
  const int64_t total = static_cast<int64_t>(n_assign) * inner;
  std::vector<double> tmat(static_cast<size_t>(total));
  std::vector<uint8_t> ok_inner(static_cast<size_t>(total), 0);
  std::vector<uint32_t> ok_bits(static_cast<size_t>(total), 0);
  EnginePool pool(model.indexer(), workers);
  parallel_run(total, workers, [&](int w, int64_t item) {
    const auto m = static_cast<uint32_t>(item / inner);
    const int64_t r = item % inner;
    CouplingSample sample{model.base_for(seed, 0, r), counts_of[m]};
    const WeightField field = model.assemble(sample);
    PathEngine& engine = pool.at(w);
    PassageOptions opt;
    opt.want_union = n_levels > 0;
    const GeodesicReport rep = model.full_query(field, engine, opt);
    tmat[static_cast<size_t>(item)] = window.clamp(rep.time);
    ok_inner[static_cast<size_t>(item)] = window.inner_contains(window.clamp(rep.time)) ? 1 : 0;
    uint32_t bits = 0;
    for (int lv = 0; lv < n_levels; ++lv) {
      const int j = j_lo + lv;
      const int64_t cnt = engine.marked_count_cached(field, model.cut(), &model.shell_edge_mask(j),
                                                     rep, model.tie_tol());
      if (cnt >= model.shells().scale().radius(j - 1)) bits |= 1u << lv;
    }
    ok_bits[static_cast<size_t>(item)] = bits;
  });

  for (uint32_t m = 0; m < n_assign; ++m) {
    const size_t begin = static_cast<size_t>(m) * static_cast<size_t>(inner);
    const std::span<const double> slice(tmat.data() + begin, static_cast<size_t>(inner));
    AssignmentRow row;
    row.bits = m;
    row.estimate = mean(slice);
    row.se = stderr_of_mean(slice);
    row.good = freq(ok_inner, begin, static_cast<size_t>(inner)) > 1.0 - xi;
    for (int lv = 0; lv < n_levels && row.good; ++lv) {
      int64_t hits = 0;
      for (int r = 0; r < inner; ++r) hits += (ok_bits[begin + static_cast<size_t>(r)] >> lv) & 1u;
      row.good = static_cast<double>(hits) / inner > 1.0 - xi;
    }
    row.in_band = row.estimate >= out.band_lo && row.estimate <= out.band_hi;
    if (row.good && row.in_band) out.selected.push_back(m);
    out.rows.push_back(row);
  }

  const SubsetFamily family = SubsetFamily::of(k, out.selected);
  out.antichain_ok = is_antichain(family);
  out.density = static_cast<double>(out.selected.size()) / std::ldexp(1.0, k);
  out.density_bound = 8.0 / std::sqrt(static_cast<double>(k));
  out.max_antichain = max_antichain_size(k);

  bool decisive_fail = !out.antichain_ok;
  bool too_close = false;
  std::vector<double> diffs(static_cast<size_t>(inner));
  for (uint32_t m : out.selected)
    for (int i = 0; i < k; ++i) {
      if (!((m >> i) & 1u)) continue;
      const uint32_t m2 = m & ~(1u << i);
      const size_t ba = static_cast<size_t>(m) * static_cast<size_t>(inner);
      const size_t bb = static_cast<size_t>(m2) * static_cast<size_t>(inner);
      for (int r = 0; r < inner; ++r)
        diffs[static_cast<size_t>(r)] =
            tmat[ba + static_cast<size_t>(r)] - tmat[bb + static_cast<size_t>(r)];
      GapRow gap;
      gap.upper = m;
      gap.lower = m2;
      gap.position = i;
      gap.gap = mean(diffs);
      gap.se = stderr_of_mean(diffs);
      out.gaps.push_back(gap);
      if (std::abs(gap.gap - epsilon) <= 3.0 * gap.se)
        too_close = true;
      else if (gap.gap <= epsilon)
        decisive_fail = true;
    }

  out.verdict = decisive_fail ? Verdict::Fail
                              : (too_close ? Verdict::Inconclusive : Verdict::Pass);
  out.note = "eligible levels " + std::to_string(k) + " of scan range [" + std::to_string(j_lo) +
             "," + std::to_string(j_hi) + "]; family " + std::to_string(out.selected.size()) +
             " of " + std::to_string(n_assign) + " assignments";
  return out;
}

SmallBallReport small_ball_scan(const StudyModel& model, const TruncationWindow& window,
                                double epsilon, double xi, int outer, int inner, uint64_t seed,
                                int workers) {
  if (outer < 2 || inner < 2) throw std::invalid_argument("need outer, inner >= 2");
  if (!(epsilon > 0)) throw std::invalid_argument("band width must be positive");
  if (!(xi > 0 && xi < 1)) throw std::invalid_argument("exceptional mass must lie in (0,1)");
  const double lo = window.inner_lo(), hi = window.inner_hi();
  if ((hi - lo) / (0.5 * epsilon) > 20000)
    throw std::invalid_argument("band width too small for the scan grid");

  const auto [j_lo, j_hi] = model.scan_range();
  const int n_levels = std::max(0, j_hi - j_lo + 1);
  const int64_t total = static_cast<int64_t>(outer) * inner;
  std::vector<double> tmat(static_cast<size_t>(total));
  std::vector<uint8_t> ok_inner(static_cast<size_t>(total), 0);
  std::vector<uint32_t> ok_bits(static_cast<size_t>(total), 0);
  EnginePool pool(model.indexer(), workers);
  parallel_run(total, workers, [&](int w, int64_t item) {
    const int64_t o = item / inner, r = item % inner;
    CouplingSample sample{model.base_for(seed, 0, r), model.counts_for(seed, o)};
    const WeightField field = model.assemble(sample);
    PathEngine& engine = pool.at(w);
    PassageOptions opt;
    opt.want_union = n_levels > 0;
    const GeodesicReport rep = model.full_query(field, engine, opt);
    tmat[static_cast<size_t>(item)] = window.clamp(rep.time);
    ok_inner[static_cast<size_t>(item)] = window.inner_contains(window.clamp(rep.time)) ? 1 : 0;
    uint32_t bits = 0;
    for (int lv = 0; lv < n_levels; ++lv) {
      const int j = j_lo + lv;
      const int64_t cnt = engine.marked_count_cached(field, model.cut(), &model.shell_edge_mask(j),
                                                     rep, model.tie_tol());
      if (cnt >= model.shells().scale().radius(j - 1)) bits |= 1u << lv;
    }
    ok_bits[static_cast<size_t>(item)] = bits;
  });

  std::vector<double> est(static_cast<size_t>(outer));
  std::vector<uint8_t> good(static_cast<size_t>(outer), 0);
  for (int o = 0; o < outer; ++o) {
    const size_t begin = static_cast<size_t>(o) * static_cast<size_t>(inner);
    est[static_cast<size_t>(o)] =
        mean(std::span<const double>(tmat.data() + begin, static_cast<size_t>(inner)));
    bool g = freq(ok_inner, begin, static_cast<size_t>(inner)) > 1.0 - xi;
    for (int lv = 0; lv < n_levels && g; ++lv) {
      int64_t hits = 0;
      for (int r = 0; r < inner; ++r) hits += (ok_bits[begin + static_cast<size_t>(r)] >> lv) & 1u;
      g = static_cast<double>(hits) / inner > 1.0 - xi;
    }
    good[static_cast<size_t>(o)] = g ? 1 : 0;
  }

  SmallBallReport out;
  out.outer = outer;
  out.inner = inner;
  out.epsilon = epsilon;
  out.xi = xi;
  for (double r = lo; r <= hi + 1e-12; r += 0.5 * epsilon) {
    int64_t in_band = 0;
    for (int o = 0; o < outer; ++o)
      if (good[static_cast<size_t>(o)] && est[static_cast<size_t>(o)] >= r &&
          est[static_cast<size_t>(o)] <= r + epsilon)
        ++in_band;
    SmallBallRow row;
    row.r = r;
    row.freq = static_cast<double>(in_band) / outer;
    out.sup_freq = std::max(out.sup_freq, row.freq);
    out.rows.push_back(row);
  }
  return out;
}

std::vector<ScanPoint> fluctuation_scan(const Distribution& f, const std::vector<int64_t>& n_list,
                                        int replicates, const ScanOptions& opt, uint64_t seed,
                                        int workers) {
  if (replicates < 2) throw std::invalid_argument("need at least two replicates");
  if (n_list.empty()) throw std::invalid_argument("empty distance list");
  if (opt.direction.d != opt.dims || opt.direction.is_zero())
    throw std::invalid_argument("scan direction must be a nonzero vector of the model dimension");
  if (!(opt.pad >= 1.0)) throw std::invalid_argument("pad factor must be at least 1");

  const double tie_tol = f.integer_valued() ? 0.0 : 1e-9;
  std::vector<ScanPoint> points;
  for (int64_t n : n_list) {
    if (n < 1) throw std::invalid_argument("distances must be positive");
    Vertex target = Vertex::zero(opt.dims);
    for (int i = 0; i < opt.dims; ++i) {
      const int64_t c = static_cast<int64_t>(opt.direction.c[i]) * n;
      if (std::abs(c) > INT32_MAX / 4) throw std::invalid_argument("target too far for indexing");
      target.c[i] = static_cast<int32_t>(c);
    }
    const auto radius = static_cast<int64_t>(std::ceil(opt.pad * target.norm_inf()));
    Box box = Box::centered(opt.dims, std::max<int64_t>(1, radius));

    std::optional<CylinderSpec> cyl;
    std::vector<uint8_t> mask;
    if (opt.cylinder) {
      cyl = make_cylinder(target, opt.alpha);
      // With an axis-aligned target the admissible strip is narrow; shrink
      // the box to one site beyond it so the search never touches the rest.
      int nonzero_axis = -1;
      int nonzero_count = 0;
      for (int i = 0; i < opt.dims; ++i)
        if (target.c[i] != 0) {
          nonzero_axis = i;
          ++nonzero_count;
        }
      if (nonzero_count == 1) {
        const auto clip = static_cast<int64_t>(std::floor(cyl->width)) + 1;
        for (int i = 0; i < opt.dims; ++i) {
          if (i == nonzero_axis) continue;
          const auto c = static_cast<int32_t>(std::min<int64_t>(box.hi.c[i], clip));
          box.lo.c[i] = -c;
          box.hi.c[i] = c;
        }
      }
    }

    VertexIndexer idx(box);
    if (cyl) mask = cylinder_vertex_mask(idx, *cyl);

    ScanPoint point;
    point.samples.assign(static_cast<size_t>(replicates), 0);
    point.boundary.assign(static_cast<size_t>(replicates), 0);
    EnginePool pool(idx, workers);
    parallel_run(replicates, workers, [&](int w, int64_t r) {
      WeightField field(box);
      fill_iid(field, f,
               derive_seed(seed, Tag::FieldIid,
                           {static_cast<uint64_t>(n), static_cast<uint64_t>(r)}));
      PassageOptions po;
      po.tie_tol = tie_tol;
      po.want_boundary = true;
      po.vertex_mask = cyl ? &mask : nullptr;
      const GeodesicReport rep =
          pool.at(w).query(field, Vertex::zero(opt.dims), target, po);
      point.samples[static_cast<size_t>(r)] = rep.time;
      point.boundary[static_cast<size_t>(r)] = rep.touched_boundary ? 1 : 0;
    });

    std::vector<double> sorted = point.samples;
    std::sort(sorted.begin(), sorted.end());
    ScanRow& row = point.row;
    row.n = n;
    row.samples = replicates;
    row.mean_t = mean(point.samples);
    row.var_t = sample_variance(point.samples);
    row.iqr = iqr_sorted(sorted);
    row.q20 = quantile_sorted(sorted, 0.20);
    row.q80 = quantile_sorted(sorted, 0.80);
    const double dist2 = target.norm_two();
    row.norm_root_log = dist2 > 1.0 ? row.iqr / std::sqrt(std::log(dist2)) : 0.0;
    const double shrink = opt.alpha * (opt.dims - 1);
    row.norm_power = shrink < 1.0 ? row.iqr / std::pow(dist2, 0.5 * (1.0 - shrink)) : 0.0;
    row.boundary_frac = freq(point.boundary, 0, point.boundary.size());
    points.push_back(std::move(point));
  }
  return points;
}

ReckoningReport reckoning_check(const StudyModel& model, const TruncationWindow& window,
                                const std::vector<double>& c_grid, int replicates, uint64_t seed,
                                int workers) {
  if (replicates < 2) throw std::invalid_argument("need at least two replicates");
  std::vector<double> times(static_cast<size_t>(replicates));
  EnginePool pool(model.indexer(), workers);
  parallel_run(replicates, workers, [&](int w, int64_t r) {
    const WeightField field = sample_iid_field(
        model.indexer().box(), model.dist(),
        derive_seed(seed, Tag::FieldIid, {static_cast<uint64_t>(r)}));
    times[static_cast<size_t>(r)] = model.passage(field, pool.at(w));
  });

  ReckoningReport out;
  out.samples = replicates;
  out.mid = window.mid();
  out.width = window.width;
  for (double c : c_grid) {
    if (!(c > 0)) throw std::invalid_argument("deviation grid entries must be positive");
    ReckoningRow row;
    row.c = c;
    int64_t lo = 0, hi = 0;
    for (double t : times) {
      lo += t <= out.mid - c * out.width ? 1 : 0;
      hi += t >= out.mid + c * out.width ? 1 : 0;
    }
    row.freq_low = static_cast<double>(lo) / replicates;
    row.freq_high = static_cast<double>(hi) / replicates;
    row.certified = std::min(row.freq_low, row.freq_high) >= c;
    if (row.certified) out.certified_c = std::max(out.certified_c, c);
    out.rows.push_back(row);
  }
  return out;
}

LawComparison coupled_vs_direct_ks(const StudyModel& model, int samples, uint64_t seed,
                                   int workers, double level) {
  if (samples < 10) throw std::invalid_argument("need at least ten samples per arm");
  std::vector<double> layered(static_cast<size_t>(samples));
  std::vector<double> direct(static_cast<size_t>(samples));
  EnginePool pool(model.indexer(), workers);
  parallel_run(2 * static_cast<int64_t>(samples), workers, [&](int w, int64_t item) {
    const int64_t r = item / 2;
    if (item % 2 == 0) {
      CouplingSample sample{model.base_for(seed, 1, r), model.counts_for(seed, r)};
      const WeightField field = model.assemble(sample);
      layered[static_cast<size_t>(r)] = model.passage(field, pool.at(w));
    } else {
      const WeightField field = sample_iid_field(
          model.indexer().box(), model.dist(),
          derive_seed(seed, Tag::FieldIid, {static_cast<uint64_t>(r)}));
      direct[static_cast<size_t>(r)] = model.passage(field, pool.at(w));
    }
  });

  LawComparison out;
  out.samples = samples;
  out.level = level;
  out.ks = ks_two_sample(layered, direct);
  out.critical = ks_two_sample_critical(static_cast<size_t>(samples),
                                        static_cast<size_t>(samples), level);
  out.pass = out.ks < out.critical;
  return out;
}

}  // namespace fpplab
