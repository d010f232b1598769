#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fpplab/field.hpp"
#include "fpplab/geometry.hpp"
#include "fpplab/weights.hpp"

namespace fpplab {

struct PassageOptions {
  // Slack for recognizing optimal-path ties.  Zero gives exact comparisons,
  // appropriate for integer-valued fields; continuous laws use a small slack
  // against rounding in the distance sums.
  double tie_tol = 1e-9;
  bool want_union = false;     // collect every edge lying on some optimal path
  bool want_boundary = false;  // check whether an optimal path meets the box boundary
  const std::vector<uint8_t>* vertex_mask = nullptr;  // admissible vertices (null = all)
};

struct GeodesicReport {
  double time = 0;
  std::vector<int64_t> witness;      // edge slots of one optimal path, source to target
  bool touched_boundary = false;
  std::vector<int64_t> union_edges;  // ascending slots, filled when requested
};

// Dijkstra workspace bound to one box, reusable across queries (sparse
// reset).  Pop order breaks distance ties by vertex index, so every result
// is a pure function of (field, query), independent of history.
class PathEngine {
 public:
  explicit PathEngine(const VertexIndexer& idx);

  const VertexIndexer& indexer() const { return *idx_; }

  // Passage time only (forward search stops once dst settles).
  double distance(const WeightField& f, const Vertex& src, const Vertex& dst,
                  const std::vector<uint8_t>* vertex_mask = nullptr);

  GeodesicReport query(const WeightField& f, const Vertex& src, const Vertex& dst,
                       const PassageOptions& opt = {});

  // Minimum, over all optimal src-dst paths, of the number of traversed
  // edges that are hi-mode (> cut) and inside the region mask (per edge
  // slot, null = everywhere).  Throws if an optimal path carries an edge too
  // light to orient (a zero-weight tie).
  int64_t min_marked_count(const WeightField& f, ModeThreshold cut, const Vertex& src,
                           const Vertex& dst, const std::vector<uint8_t>* region_mask,
                           const PassageOptions& opt = {});

  // Same count reusing the searches of the most recent query() on this
  // engine, which must have run with want_union over the same field; lets a
  // caller evaluate several region masks per replicate at one query's cost.
  int64_t marked_count_cached(const WeightField& f, ModeThreshold cut,
                              const std::vector<uint8_t>* region_mask,
                              const GeodesicReport& rep, double tie_tol);

 private:
  struct Pass {
    std::vector<double> dist;
    std::vector<int64_t> parent_slot;
    std::vector<int64_t> touched;
    void reset();
  };

  // Settle from src.  Stops once the frontier exceeds abs_threshold; when
  // stop_vertex settles at distance T, the threshold additionally drops to
  // T + slack (slack < 0 stops right there).  Every vertex whose true
  // distance is at most the final threshold ends up settled.
  void run(const WeightField& f, int64_t src, int64_t stop_vertex, double slack,
           double abs_threshold, const std::vector<uint8_t>* mask, Pass& pass,
           bool track_parents);

  const VertexIndexer* idx_;
  Pass fwd_, bwd_;
  std::vector<std::pair<double, int64_t>> heap_;
  // scratch for min_marked_count
  std::vector<int64_t> order_;
  std::vector<int64_t> cost_;
};

// Convenience wrappers constructing a fresh engine.
GeodesicReport passage_time(const WeightField& f, const Vertex& src, const Vertex& dst,
                            const PassageOptions& opt = {});
std::vector<int64_t> geodesic_union(const WeightField& f, const Vertex& src, const Vertex& dst,
                                    double tie_tol = 1e-9);
int64_t min_himode_count(const WeightField& f, ModeThreshold cut, const Vertex& src,
                         const Vertex& dst, const std::vector<uint8_t>* region_mask = nullptr,
                         double tie_tol = 1e-9);

// Vertices of the box admissible for cylinder-restricted passage.
std::vector<uint8_t> cylinder_vertex_mask(const VertexIndexer& idx, const CylinderSpec& spec);

// Passage from the origin to spec.target among vertices of the cylinder.
// Throws if the restriction disconnects the endpoints.
GeodesicReport cylinder_passage_time(const WeightField& f, const CylinderSpec& spec,
                                     PassageOptions opt = {});

// ---- time-constant probe -------------------------------------------------

struct TimeConstantRow {
  int64_t n = 0;
  double mean = 0, se = 0;
  std::optional<double> mean_aug, se_aug;  // same fields with hi-mode weights raised by 1
};

// Monte Carlo table of T(0, n * direction) / n on padded boxes; when cut is
// given, each replicate also solves the hi-mode-augmented copy of its field.
std::vector<TimeConstantRow> estimate_time_constant(const Distribution& f, const Vertex& direction,
                                                    const std::vector<int64_t>& n_list,
                                                    int replicates, double pad, uint64_t seed,
                                                    int workers,
                                                    std::optional<ModeThreshold> cut = {});

}  // namespace fpplab
