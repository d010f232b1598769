#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "fpplab/coupling.hpp"
#include "fpplab/field.hpp"
#include "fpplab/geometry.hpp"
#include "fpplab/paths.hpp"
#include "fpplab/weights.hpp"

namespace fpplab {

// Clamp window [a_low, a_low + width] for passage times, with the central
// half-window used as the small-ball target interval.
struct TruncationWindow {
  double a_low = 0;
  double width = 0;

  double b_high() const { return a_low + width; }
  double mid() const { return a_low + 0.5 * width; }
  double inner_lo() const { return mid() - 0.25 * width; }
  double inner_hi() const { return mid() + 0.25 * width; }
  double clamp(double t) const { return std::clamp(t, a_low, b_high()); }
  bool inner_contains(double t) const { return t >= inner_lo() && t <= inner_hi(); }
};

struct ModelOptions {
  Distribution dist = Distribution::exponential(1.0);
  double threshold_quantile = 0.5;
  std::optional<double> explicit_cut;  // overrides the quantile choice
  int64_t scale_base = 4;
  std::optional<int> scale_levels;  // default: smallest ladder covering pad * |x|_inf
  int dims = 2;
  double pad = 1.5;
  Vertex target = Vertex::of({8, 0});
  bool cylinder = false;
  double alpha = 0.25;
};

// Everything the experiment drivers need about one study point: the law and
// its lo/hi cut, the ambient shell ladder, cylinder restriction, clamp-window
// width, and the deviation scan range.  Immutable after construction and
// safe to share across worker threads.
class StudyModel {
 public:
  explicit StudyModel(ModelOptions opt);

  const ModelOptions& options() const { return opt_; }
  const Distribution& dist() const { return opt_.dist; }
  ModeThreshold cut() const { return cut_; }
  double p_hi() const { return p_hi_; }
  const Vertex& target() const { return opt_.target; }
  int dims() const { return opt_.dims; }
  bool cylinder() const { return opt_.cylinder; }
  const std::optional<CylinderSpec>& cylinder_spec() const { return cyl_spec_; }
  const ShellSystem& shells() const { return *shells_; }
  const VertexIndexer& indexer() const { return shells_->indexer(); }
  const std::vector<uint8_t>* passage_mask() const {
    return opt_.cylinder ? &cyl_mask_ : nullptr;
  }
  double tie_tol() const { return tie_tol_; }
  double window_width() const { return width_; }
  std::pair<int, int> scan_range() const { return scan_range_; }
  // Edge mask of one shell (levels inside the scan range only).
  const std::vector<uint8_t>& shell_edge_mask(int j) const;

  // Per-replicate sampling.  Bases share streams across calls with equal
  // (seed, salt, rep): the pairing device behind every comparison.
  std::shared_ptr<const CouplingBase> base_for(uint64_t seed, uint64_t salt, int64_t rep) const;
  std::vector<int64_t> counts_for(uint64_t seed, int64_t outer) const;
  HalfPairDraw half_pair_for(int level, uint64_t seed, uint64_t attempt) const;
  WeightField assemble(const CouplingSample& sample) const {
    return assemble_field(*shells_, sample, p_hi_);
  }

  double passage(const WeightField& field, PathEngine& engine) const {
    return engine.distance(field, Vertex::zero(opt_.dims), opt_.target, passage_mask());
  }
  GeodesicReport full_query(const WeightField& field, PathEngine& engine,
                            PassageOptions options) const {
    options.tie_tol = tie_tol_;
    options.vertex_mask = passage_mask();
    return engine.query(field, Vertex::zero(opt_.dims), opt_.target, options);
  }

 private:
  ModelOptions opt_;
  ModeThreshold cut_;
  double p_hi_ = 0;
  std::unique_ptr<ShellSystem> shells_;
  std::optional<CylinderSpec> cyl_spec_;
  std::vector<uint8_t> cyl_mask_;
  double width_ = 0;
  double tie_tol_ = 1e-9;
  std::pair<int, int> scan_range_{1, 0};
  std::vector<std::pair<int, std::vector<uint8_t>>> shell_masks_;
};

// Clamp-window width for a study point: sqrt(log |x|) in the plane, a power
// law |x|^{(1 - alpha (d-1)) / 2} inside a cylinder of exponent alpha.
double window_width_for(const Vertex& x, bool cylinder, double alpha, int dims);

}  // namespace fpplab
