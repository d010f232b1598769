#include "fpplab/model.hpp"

#include <cmath>
#include <stdexcept>

#include "fpplab/paths.hpp"

namespace fpplab {

double window_width_for(const Vertex& x, bool cylinder, double alpha, int dims) {
  const double norm = x.norm_two();
  if (norm < 1.0) throw std::invalid_argument("window width undefined below unit distance");
  if (!cylinder) return std::sqrt(std::log(norm));
  const double shrink = alpha * (dims - 1);
  if (!(shrink < 1.0))
    throw std::invalid_argument("cylinder exponent too large for this dimension");
  return std::pow(norm, 0.5 * (1.0 - shrink));
}

StudyModel::StudyModel(ModelOptions opt) : opt_(std::move(opt)) {
  if (opt_.dims < 2 || opt_.dims > kMaxDims)
    throw std::invalid_argument("dimension out of range");
  if (opt_.target.d != opt_.dims)
    throw std::invalid_argument("target dimension disagrees with the model dimension");
  if (opt_.target.is_zero()) throw std::invalid_argument("target must be away from the origin");
  if (!(opt_.pad >= 1.0)) throw std::invalid_argument("pad factor must be at least 1");

  if (opt_.explicit_cut) {
    cut_ = ModeThreshold{*opt_.explicit_cut};
    const double fc = opt_.dist.cdf(cut_.value);
    if (!(fc > 0.0 && fc < 1.0))
      throw std::invalid_argument("threshold must split the law into two modes");
  } else {
    cut_ = choose_threshold(opt_.dist, opt_.threshold_quantile);
  }
  p_hi_ = 1.0 - opt_.dist.cdf(cut_.value);

  ScaleParams scale;
  scale.base = opt_.scale_base;
  if (opt_.scale_levels) {
    scale.levels = *opt_.scale_levels;
  } else {
    const double need = opt_.pad * opt_.target.norm_inf();
    int j = 1;
    while (scale.radius(j) < need && j < 40) ++j;
    scale.levels = j;
  }
  scale.check();
  if (scale.radius(scale.levels) < opt_.target.norm_inf())
    throw std::invalid_argument("scale ladder does not reach the target");
  const Box box = Box::centered(opt_.dims, scale.radius(scale.levels));

  if (opt_.cylinder) {
    cyl_spec_ = make_cylinder(opt_.target, opt_.alpha);
    VertexIndexer idx(box);
    cyl_mask_ = cylinder_vertex_mask(idx, *cyl_spec_);
    shells_ = std::make_unique<ShellSystem>(box, scale, &cyl_mask_);
  } else {
    shells_ = std::make_unique<ShellSystem>(box, scale, nullptr);
  }

  width_ = window_width_for(opt_.target, opt_.cylinder, opt_.alpha, opt_.dims);
  tie_tol_ = opt_.dist.integer_valued() ? 0.0 : 1e-9;
  scan_range_ = deviation_scan_range(scale, opt_.target, opt_.cylinder);

  for (int j = scan_range_.first; j <= scan_range_.second; ++j) {
    std::vector<uint8_t> mask(static_cast<size_t>(indexer().edge_slot_count()), 0);
    for (int64_t slot : shells_->shell_slots(j)) mask[static_cast<size_t>(slot)] = 1;
    shell_masks_.emplace_back(j, std::move(mask));
  }
}

const std::vector<uint8_t>& StudyModel::shell_edge_mask(int j) const {
  for (const auto& [lvl, mask] : shell_masks_)
    if (lvl == j) return mask;
  throw std::out_of_range("shell mask requested outside the scan range");
}

std::shared_ptr<const CouplingBase> StudyModel::base_for(uint64_t seed, uint64_t salt,
                                                         int64_t rep) const {
  const uint64_t s = derive_seed(seed, Tag::Replicate, {salt, static_cast<uint64_t>(rep)});
  return sample_coupling_base(*shells_, opt_.dist, cut_, s);
}

std::vector<int64_t> StudyModel::counts_for(uint64_t seed, int64_t outer) const {
  const uint64_t s = derive_seed(seed, Tag::CouplingCounts, {static_cast<uint64_t>(outer)});
  return sample_shell_counts(*shells_, p_hi_, s);
}

HalfPairDraw StudyModel::half_pair_for(int level, uint64_t seed, uint64_t attempt) const {
  Rng rng(derive_seed(seed, Tag::SplitDraws, {attempt, static_cast<uint64_t>(level)}));
  return sample_half_pair(shells_->shell_size(level), p_hi_, rng);
}

}  // namespace fpplab
