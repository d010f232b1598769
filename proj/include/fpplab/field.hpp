#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "fpplab/geometry.hpp"
#include "fpplab/weights.hpp"

namespace fpplab {

// Edge weights over a box, stored per edge slot (invalid slots hold NaN).
struct WeightField {
  VertexIndexer idx;
  std::vector<double> w;

  explicit WeightField(const Box& box)
      : idx(box), w(static_cast<size_t>(idx.edge_slot_count()),
                    std::numeric_limits<double>::quiet_NaN()) {}

  double weight(int64_t slot) const { return w[static_cast<size_t>(slot)]; }
  void set(int64_t slot, double v) { w[static_cast<size_t>(slot)] = v; }
};

// Key of an edge by its absolute lattice position, independent of the box it
// is viewed through.  Fields filled from (key, seed) therefore agree on the
// overlap of two different windows — the basis of all shared-seed pairings.
inline uint64_t edge_key(const Vertex& lower, int axis) {
  auto zig = [](int32_t v) {
    const uint32_t u = static_cast<uint32_t>(v);
    return static_cast<uint64_t>((u << 1) ^ static_cast<uint32_t>(v >> 31));
  };
  uint64_t h = 0x8D1F'3F9C'A562'B4D1ULL + static_cast<uint64_t>(axis);
  for (int i = 0; i < lower.d; ++i) h = mix_key(h, zig(lower.c[i]));
  return h;
}

// Independent draws from f on every edge of the field's box.
inline void fill_iid(WeightField& field, const Distribution& f, uint64_t field_seed) {
  const VertexIndexer& idx = field.idx;
  const int d = idx.dims();
  const int64_t slots = idx.edge_slot_count();
  for (int64_t s = 0; s < slots; ++s) {
    if (!idx.slot_valid(s)) continue;
    const int axis = static_cast<int>(s % d);
    const uint64_t key = mix_key(field_seed, edge_key(idx.vertex(s / d), axis));
    field.set(s, f.quantile(keyed_unit_open(key)));
  }
}

inline WeightField sample_iid_field(const Box& box, const Distribution& f, uint64_t field_seed) {
  WeightField field(box);
  fill_iid(field, f, field_seed);
  return field;
}

// Copy with every hi-mode weight raised by one; lo-mode edges are untouched.
inline WeightField augment_himode(const WeightField& field, ModeThreshold cut) {
  WeightField out = field;
  for (double& v : out.w)
    if (v > cut.value) v += 1.0;
  return out;
}

inline bool field_integer_valued(const WeightField& field) {
  for (double v : field.w)
    if (!std::isnan(v) && std::floor(v) != v) return false;
  return true;
}

}  // namespace fpplab
