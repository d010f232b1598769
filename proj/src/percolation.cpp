#include "fpplab/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace fpplab {

namespace {

struct DisjointSet {
  std::vector<int64_t> parent;
  explicit DisjointSet(int64_t n) : parent(static_cast<size_t>(n)) {
    std::iota(parent.begin(), parent.end(), int64_t{0});
  }
  int64_t find(int64_t x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  }
  void unite(int64_t a, int64_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // Smaller index wins the root, so roots double as canonical cluster ids.
    if (b < a) std::swap(a, b);
    parent[static_cast<size_t>(b)] = a;
  }
};

}  // namespace

ClusterLabeling open_clusters(const WeightField& field, double threshold) {
  const VertexIndexer& idx = field.idx;
  const int64_t V = idx.vertex_count();
  DisjointSet ds(V);
  for (int64_t s = 0; s < idx.edge_slot_count(); ++s) {
    const double w = field.w[static_cast<size_t>(s)];
    if (std::isnan(w) || w > threshold) continue;
    const auto [a, b] = idx.slot_endpoints(s);
    ds.unite(a, b);
  }
  ClusterLabeling out;
  out.threshold = threshold;
  out.vertex_count = V;
  out.label.resize(static_cast<size_t>(V));
  std::unordered_map<int64_t, int64_t> size;
  for (int64_t v = 0; v < V; ++v) {
    const int64_t root = ds.find(v);
    out.label[static_cast<size_t>(v)] = root;
    ++size[root];
  }
  for (const auto& [id, n] : size) {
    if (n > out.giant_size || (n == out.giant_size && id < out.giant_id)) {
      out.giant_size = n;
      out.giant_id = id;
    }
  }
  return out;
}

Vertex nearest_giant_vertex(const ClusterLabeling& labeling, const VertexIndexer& idx,
                            const Vertex& x) {
  if (labeling.giant_id < 0) throw std::runtime_error("labeling has no clusters");
  bool found = false;
  Vertex best;
  double best_d2 = 0;
  for (int64_t v = 0; v < idx.vertex_count(); ++v) {
    if (!labeling.in_giant(v)) continue;
    const Vertex cand = idx.vertex(v);
    double d2 = 0;
    for (int i = 0; i < cand.d; ++i) {
      const double diff = static_cast<double>(cand.c[i]) - x.c[i];
      d2 += diff * diff;
    }
    if (!found || d2 < best_d2 || (d2 == best_d2 && cand < best)) {
      found = true;
      best = cand;
      best_d2 = d2;
    }
  }
  if (!found) throw std::runtime_error("giant cluster is empty");
  return best;
}

bool shelter_check(const ClusterLabeling& labeling, const VertexIndexer& idx, const Vertex& center,
                   int64_t n) {
  if (n < 1) throw std::invalid_argument("shelter radius must be >= 1");
  const Box& box = idx.box();
  Vertex lo = center, hi = center;
  for (int i = 0; i < center.d; ++i) {
    lo.c[i] = static_cast<int32_t>(center.c[i] - n);
    hi.c[i] = static_cast<int32_t>(center.c[i] + n);
    if (lo.c[i] < box.lo.c[i] || hi.c[i] > box.hi.c[i])
      throw std::invalid_argument("shelter sub-box leaves the ambient box");
  }
  const int64_t c = idx.index(center);
  if (labeling.in_giant(c)) return true;

  // Flood through non-giant vertices; escaping means touching the shell of
  // the sub-box without ever entering the giant cluster.
  auto on_shell = [&](const Vertex& v) {
    for (int i = 0; i < v.d; ++i)
      if (v.c[i] == lo.c[i] || v.c[i] == hi.c[i]) return true;
    return false;
  };
  std::vector<int64_t> stack{c};
  std::vector<uint8_t> seen(static_cast<size_t>(idx.vertex_count()), 0);
  seen[static_cast<size_t>(c)] = 1;
  while (!stack.empty()) {
    const int64_t v = stack.back();
    stack.pop_back();
    const Vertex vv = idx.vertex(v);
    if (on_shell(vv)) return false;
    for (int axis = 0; axis < vv.d; ++axis) {
      for (int dir = -1; dir <= 1; dir += 2) {
        Vertex nb = vv;
        nb.c[axis] = static_cast<int32_t>(nb.c[axis] + dir);
        if (nb.c[axis] < lo.c[axis] || nb.c[axis] > hi.c[axis]) continue;
        const int64_t u = idx.index(nb);
        if (seen[static_cast<size_t>(u)] || labeling.in_giant(u)) continue;
        seen[static_cast<size_t>(u)] = 1;
        stack.push_back(u);
      }
    }
  }
  return true;
}

}  // namespace fpplab
