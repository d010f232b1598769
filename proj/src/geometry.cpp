#include "fpplab/geometry.hpp"

namespace fpplab {

std::vector<Edge> box_edges(const ScaleParams& p, int j, int dims) {
  const Box box = scale_box(p, j, dims);
  VertexIndexer idx(box);
  std::vector<Edge> out;
  out.reserve(static_cast<size_t>(idx.edge_slot_count()));
  for (int64_t s = 0; s < idx.edge_slot_count(); ++s)
    if (idx.slot_valid(s)) out.push_back(idx.slot_edge(s));
  return out;
}

std::vector<Edge> shell_edges(const ScaleParams& p, int j, int dims) {
  std::vector<Edge> out = box_edges(p, j, dims);
  if (j == 1) return out;
  const Box inner = scale_box(p, j - 1, dims);
  std::erase_if(out, [&](const Edge& e) { return inner.contains(e.a) && inner.contains(e.b); });
  return out;
}

}  // namespace fpplab
