#include "fpplab/paths.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fpplab/parallel.hpp"
#include "fpplab/rng.hpp"
#include "fpplab/stats.hpp"

namespace fpplab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void PathEngine::Pass::reset() {
  for (int64_t v : touched) {
    dist[static_cast<size_t>(v)] = kInf;
    parent_slot[static_cast<size_t>(v)] = -1;
  }
  touched.clear();
}

PathEngine::PathEngine(const VertexIndexer& idx) : idx_(&idx) {
  const auto n = static_cast<size_t>(idx.vertex_count());
  fwd_.dist.assign(n, kInf);
  fwd_.parent_slot.assign(n, -1);
  bwd_.dist.assign(n, kInf);
  bwd_.parent_slot.assign(n, -1);
}

void PathEngine::run(const WeightField& f, int64_t src, int64_t stop_vertex, double slack,
                     double abs_threshold, const std::vector<uint8_t>* mask, Pass& pass,
                     bool track_parents) {
  const VertexIndexer& idx = *idx_;
  const int d = idx.dims();
  pass.reset();
  heap_.clear();

  auto push = [&](double dv, int64_t v) { heap_.emplace_back(dv, v); std::push_heap(heap_.begin(), heap_.end(), std::greater<>{}); };
  auto pop = [&] { std::pop_heap(heap_.begin(), heap_.end(), std::greater<>{}); auto t = heap_.back(); heap_.pop_back(); return t; };

  pass.dist[static_cast<size_t>(src)] = 0;
  pass.touched.push_back(src);
  push(0.0, src);
  double threshold = abs_threshold;

  while (!heap_.empty()) {
    const auto [dv, v] = pop();
    if (dv > pass.dist[static_cast<size_t>(v)]) continue;  // stale entry
    if (dv > threshold) break;
    if (v == stop_vertex) {
      // Target settled: its distance is final.  Keep settling only as far as
      // the slack asks for (negative slack stops immediately).
      threshold = std::min(threshold, dv + slack);
      if (slack < 0) break;
    }

    for (int axis = 0; axis < d; ++axis) {
      const int32_t c = idx.coord(v, axis);
      // +axis neighbour; the edge slot sits at the lower endpoint v.
      if (c < idx.box().hi.c[axis]) {
        const int64_t u = v + idx.stride(axis);
        const double wv = f.w[static_cast<size_t>(v * d + axis)];
        const double du = dv + wv;
        if (du < pass.dist[static_cast<size_t>(u)] &&
            (!mask || (*mask)[static_cast<size_t>(u)])) {
          if (pass.dist[static_cast<size_t>(u)] == kInf) pass.touched.push_back(u);
          pass.dist[static_cast<size_t>(u)] = du;
          if (track_parents) pass.parent_slot[static_cast<size_t>(u)] = v * d + axis;
          push(du, u);
        }
      }
      // -axis neighbour; the edge slot sits at the lower endpoint u.
      if (c > idx.box().lo.c[axis]) {
        const int64_t u = v - idx.stride(axis);
        const double wv = f.w[static_cast<size_t>(u * d + axis)];
        const double du = dv + wv;
        if (du < pass.dist[static_cast<size_t>(u)] &&
            (!mask || (*mask)[static_cast<size_t>(u)])) {
          if (pass.dist[static_cast<size_t>(u)] == kInf) pass.touched.push_back(u);
          pass.dist[static_cast<size_t>(u)] = du;
          if (track_parents) pass.parent_slot[static_cast<size_t>(u)] = u * d + axis;
          push(du, u);
        }
      }
    }
  }
}

double PathEngine::distance(const WeightField& f, const Vertex& src, const Vertex& dst,
                            const std::vector<uint8_t>* mask) {
  if (!idx_->box().contains(src) || !idx_->box().contains(dst))
    throw std::invalid_argument("passage endpoints must lie in the box");
  const int64_t s = idx_->index(src), t = idx_->index(dst);
  if (s == t) return 0.0;
  run(f, s, t, -kInf, kInf, mask, fwd_, false);
  const double T = fwd_.dist[static_cast<size_t>(t)];
  if (T == kInf) throw std::runtime_error("no admissible path between the endpoints");
  return T;
}

GeodesicReport PathEngine::query(const WeightField& f, const Vertex& src, const Vertex& dst,
                                 const PassageOptions& opt) {
  const VertexIndexer& idx = *idx_;
  if (!idx.box().contains(src) || !idx.box().contains(dst))
    throw std::invalid_argument("passage endpoints must lie in the box");
  if (opt.vertex_mask) {
    if (!(*opt.vertex_mask)[static_cast<size_t>(idx.index(src))] ||
        !(*opt.vertex_mask)[static_cast<size_t>(idx.index(dst))])
      throw std::invalid_argument("passage endpoints fall outside the admissible region");
  }
  GeodesicReport rep;
  const int64_t s = idx.index(src), t = idx.index(dst);
  if (s == t) return rep;

  const bool need_bwd = opt.want_union || opt.want_boundary;
  // Forward pass; with a second pass coming, keep settling to T + tol so
  // every vertex that could sit on an optimal path has its exact distance.
  run(f, s, t, need_bwd ? opt.tie_tol : -kInf, kInf, opt.vertex_mask, fwd_, true);
  const double T = fwd_.dist[static_cast<size_t>(t)];
  if (T == kInf) throw std::runtime_error("no admissible path between the endpoints");
  rep.time = T;

  for (int64_t v = t; v != s;) {
    const int64_t slot = fwd_.parent_slot[static_cast<size_t>(v)];
    rep.witness.push_back(slot);
    const auto [a, b] = idx.slot_endpoints(slot);
    v = (v == b) ? a : b;
  }
  std::reverse(rep.witness.begin(), rep.witness.end());

  if (!need_bwd) return rep;

  // Backward pass, clipped at T + tol: anything farther from the target
  // cannot lie on an optimal path.
  const double bound = T + opt.tie_tol;
  run(f, t, -1, 0.0, bound, opt.vertex_mask, bwd_, false);
  if (opt.want_boundary) {
    for (int64_t v : fwd_.touched) {
      if (fwd_.dist[static_cast<size_t>(v)] + bwd_.dist[static_cast<size_t>(v)] <= bound &&
          idx.box().on_boundary(idx.vertex(v))) {
        rep.touched_boundary = true;
        break;
      }
    }
  }
  if (opt.want_union) {
    // An edge {u,v} lies on an optimal path iff traversing it in one
    // direction splices into distance exactly T (within tolerance).
    for (int64_t v : fwd_.touched) {
      if (fwd_.dist[static_cast<size_t>(v)] > bound) continue;
      const int d = idx.dims();
      for (int axis = 0; axis < d; ++axis) {
        if (idx.coord(v, axis) >= idx.box().hi.c[axis]) continue;
        const int64_t u = v + idx.stride(axis);
        const double w = f.w[static_cast<size_t>(v * d + axis)];
        const double a = fwd_.dist[static_cast<size_t>(v)] + w + bwd_.dist[static_cast<size_t>(u)];
        const double b = fwd_.dist[static_cast<size_t>(u)] + w + bwd_.dist[static_cast<size_t>(v)];
        if (std::min(a, b) <= bound) rep.union_edges.push_back(v * d + axis);
      }
    }
    std::sort(rep.union_edges.begin(), rep.union_edges.end());
    rep.union_edges.erase(std::unique(rep.union_edges.begin(), rep.union_edges.end()),
                          rep.union_edges.end());
  }
  return rep;
}

int64_t PathEngine::min_marked_count(const WeightField& f, ModeThreshold cut, const Vertex& src,
                                     const Vertex& dst, const std::vector<uint8_t>* region_mask,
                                     const PassageOptions& opt) {
  if (idx_->index(src) == idx_->index(dst)) return 0;
  PassageOptions o = opt;
  o.want_union = true;
  const GeodesicReport rep = query(f, src, dst, o);
  return marked_count_cached(f, cut, region_mask, rep, o.tie_tol);
}

int64_t PathEngine::marked_count_cached(const WeightField& f, ModeThreshold cut,
                                        const std::vector<uint8_t>* region_mask,
                                        const GeodesicReport& rep, double tie_tol) {
  const VertexIndexer& idx = *idx_;
  if (fwd_.touched.empty() || bwd_.touched.empty())
    throw std::logic_error("marked_count_cached needs a preceding union query");
  // run() seeds each pass with its source, so the endpoints are recoverable.
  const int64_t s = fwd_.touched.front();
  const int64_t t = bwd_.touched.front();
  const double bound = rep.time + tie_tol;

  // Optimal paths, oriented by strictly decreasing distance-to-target, form
  // a DAG: relax its vertices in ascending backward distance.  cost[v] =
  // cheapest number of marked edges on an optimal v -> dst continuation.
  order_.clear();
  for (int64_t v : fwd_.touched) {
    const double a = fwd_.dist[static_cast<size_t>(v)], b = bwd_.dist[static_cast<size_t>(v)];
    if (a + b <= bound) order_.push_back(v);
  }
  std::sort(order_.begin(), order_.end(), [&](int64_t x, int64_t y) {
    const double bx = bwd_.dist[static_cast<size_t>(x)], by = bwd_.dist[static_cast<size_t>(y)];
    return bx < by || (bx == by && x < y);
  });

  cost_.assign(fwd_.dist.size(), -1);
  cost_[static_cast<size_t>(t)] = 0;
  const int d = idx.dims();
  for (int64_t v : order_) {
    if (v == t) continue;
    int64_t best = -1;
    for (int axis = 0; axis < d; ++axis) {
      for (int sign = 0; sign < 2; ++sign) {
        int64_t u, slot;
        if (sign == 0) {
          if (idx.coord(v, axis) >= idx.box().hi.c[axis]) continue;
          u = v + idx.stride(axis);
          slot = v * d + axis;
        } else {
          if (idx.coord(v, axis) <= idx.box().lo.c[axis]) continue;
          u = v - idx.stride(axis);
          slot = u * d + axis;
        }
        const double w = f.w[static_cast<size_t>(slot)];
        // Edge lies on an optimal path leaving v towards the target?
        if (fwd_.dist[static_cast<size_t>(v)] + w + bwd_.dist[static_cast<size_t>(u)] > bound)
          continue;
        // Optimal in both directions means the edge is (near) weightless and
        // the decreasing-distance orientation breaks down.
        if (fwd_.dist[static_cast<size_t>(u)] + w + bwd_.dist[static_cast<size_t>(v)] <= bound)
          throw std::runtime_error("zero-weight tie on an optimal path; counts are ill-defined");
        const int64_t cu = cost_[static_cast<size_t>(u)];
        if (cu < 0) continue;  // u not yet relaxed: not on this DAG level
        const bool marked =
            w > cut.value && (!region_mask || (*region_mask)[static_cast<size_t>(slot)]);
        const int64_t c = cu + (marked ? 1 : 0);
        if (best < 0 || c < best) best = c;
      }
    }
    if (best < 0) throw std::runtime_error("optimal-path DAG relaxation failed");
    cost_[static_cast<size_t>(v)] = best;
  }
  const int64_t res = cost_[static_cast<size_t>(s)];
  if (res < 0) throw std::runtime_error("optimal-path DAG relaxation failed");
  return res;
}

GeodesicReport passage_time(const WeightField& f, const Vertex& src, const Vertex& dst,
                            const PassageOptions& opt) {
  PathEngine engine(f.idx);
  return engine.query(f, src, dst, opt);
}

std::vector<int64_t> geodesic_union(const WeightField& f, const Vertex& src, const Vertex& dst,
                                    double tie_tol) {
  PathEngine engine(f.idx);
  PassageOptions opt;
  opt.tie_tol = tie_tol;
  opt.want_union = true;
  return engine.query(f, src, dst, opt).union_edges;
}

int64_t min_himode_count(const WeightField& f, ModeThreshold cut, const Vertex& src,
                         const Vertex& dst, const std::vector<uint8_t>* region_mask,
                         double tie_tol) {
  PathEngine engine(f.idx);
  PassageOptions opt;
  opt.tie_tol = tie_tol;
  return engine.min_marked_count(f, cut, src, dst, region_mask, opt);
}

std::vector<uint8_t> cylinder_vertex_mask(const VertexIndexer& idx, const CylinderSpec& spec) {
  std::vector<uint8_t> mask(static_cast<size_t>(idx.vertex_count()), 0);
  for (int64_t v = 0; v < idx.vertex_count(); ++v)
    mask[static_cast<size_t>(v)] = cylinder_contains(spec, idx.vertex(v)) ? 1 : 0;
  return mask;
}

GeodesicReport cylinder_passage_time(const WeightField& f, const CylinderSpec& spec,
                                     PassageOptions opt) {
  const std::vector<uint8_t> mask = cylinder_vertex_mask(f.idx, spec);
  opt.vertex_mask = &mask;
  PathEngine engine(f.idx);
  return engine.query(f, Vertex::zero(spec.target.d), spec.target, opt);
}

std::vector<TimeConstantRow> estimate_time_constant(const Distribution& f, const Vertex& direction,
                                                    const std::vector<int64_t>& n_list,
                                                    int replicates, double pad, uint64_t seed,
                                                    int workers, std::optional<ModeThreshold> cut) {
  if (direction.is_zero()) throw std::invalid_argument("direction must be nonzero");
  if (replicates < 2) throw std::invalid_argument("need at least two replicates");
  std::vector<TimeConstantRow> rows;
  for (int64_t n : n_list) {
    Vertex target = direction;
    for (int i = 0; i < target.d; ++i) {
      const int64_t c = static_cast<int64_t>(direction.c[i]) * n;
      if (std::abs(c) > INT32_MAX / 4) throw std::invalid_argument("target too far for indexing");
      target.c[i] = static_cast<int32_t>(c);
    }
    const int64_t radius = std::max<int64_t>(1, static_cast<int64_t>(std::ceil(pad * target.norm_inf())));
    const Box box = Box::centered(direction.d, radius);

    std::vector<double> plain(static_cast<size_t>(replicates));
    std::vector<double> aug(cut ? static_cast<size_t>(replicates) : 0);
    parallel_run(replicates, workers, [&](int, int64_t r) {
      WeightField field(box);
      fill_iid(field, f, derive_seed(seed, Tag::FieldIid, {static_cast<uint64_t>(n), static_cast<uint64_t>(r)}));
      PathEngine engine(field.idx);
      const Vertex origin = Vertex::zero(direction.d);
      plain[static_cast<size_t>(r)] = engine.distance(field, origin, target) / static_cast<double>(n);
      if (cut) {
        const WeightField raised = augment_himode(field, *cut);
        aug[static_cast<size_t>(r)] = engine.distance(raised, origin, target) / static_cast<double>(n);
      }
    });

    TimeConstantRow row;
    row.n = n;
    row.mean = mean(plain);
    row.se = stderr_of_mean(plain);
    if (cut) {
      row.mean_aug = mean(aug);
      row.se_aug = stderr_of_mean(aug);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fpplab
