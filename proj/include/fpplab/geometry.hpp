#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace fpplab {

inline constexpr int kMaxDims = 8;

// Lattice vertex with runtime dimension d >= 2.  Coordinates are int32; all
// index arithmetic is done in int64 so boxes with ~10^7 vertices are safe.
struct Vertex {
  std::array<int32_t, kMaxDims> c{};
  int d = 2;

  static Vertex zero(int dims) {
    Vertex v;
    v.d = dims;
    return v;
  }
  static Vertex of(std::initializer_list<int32_t> xs) {
    Vertex v;
    v.d = static_cast<int>(xs.size());
    int i = 0;
    for (int32_t x : xs) v.c[i++] = x;
    return v;
  }

  int32_t operator[](int i) const { return c[i]; }
  int32_t& operator[](int i) { return c[i]; }

  bool operator==(const Vertex& o) const {
    if (d != o.d) return false;
    for (int i = 0; i < d; ++i)
      if (c[i] != o.c[i]) return false;
    return true;
  }
  bool operator!=(const Vertex& o) const { return !(*this == o); }
  // Lexicographic order; also the order induced by box indexing.
  bool operator<(const Vertex& o) const {
    for (int i = 0; i < d; ++i)
      if (c[i] != o.c[i]) return c[i] < o.c[i];
    return false;
  }

  int32_t norm_inf() const {
    int32_t m = 0;
    for (int i = 0; i < d; ++i) m = std::max(m, std::abs(c[i]));
    return m;
  }
  int64_t norm_one() const {
    int64_t s = 0;
    for (int i = 0; i < d; ++i) s += std::abs(static_cast<int64_t>(c[i]));
    return s;
  }
  double norm_two() const {
    double s = 0;
    for (int i = 0; i < d; ++i) s += static_cast<double>(c[i]) * c[i];
    return std::sqrt(s);
  }
  bool is_zero() const { return norm_inf() == 0; }

  std::string str() const {
    std::string s = "(";
    for (int i = 0; i < d; ++i) {
      if (i) s += ",";
      s += std::to_string(c[i]);
    }
    return s + ")";
  }
};

// Nearest-neighbour edge, canonical form: a < b lexicographically and b = a + e_axis.
struct Edge {
  Vertex a, b;
  bool operator==(const Edge& o) const { return a == o.a && b == o.b; }
  bool operator<(const Edge& o) const { return a < o.a || (a == o.a && b < o.b); }
};

inline Edge make_edge(Vertex u, Vertex v) {
  if (u.d != v.d) throw std::invalid_argument("edge endpoints disagree on dimension");
  int64_t diff = 0;
  for (int i = 0; i < u.d; ++i) diff += std::abs(static_cast<int64_t>(u.c[i]) - v.c[i]);
  if (diff != 1) throw std::invalid_argument("edge endpoints are not nearest neighbours");
  if (v < u) std::swap(u, v);
  return Edge{u, v};
}

// Axis-aligned box of lattice vertices, inclusive bounds.
struct Box {
  Vertex lo, hi;

  int dims() const { return lo.d; }

  static Box centered(int dims, int64_t radius) {
    if (dims < 2 || dims > kMaxDims) throw std::invalid_argument("dimension out of range");
    if (radius < 1 || radius > INT32_MAX / 2) throw std::invalid_argument("box radius out of range");
    Box b;
    b.lo.d = b.hi.d = dims;
    for (int i = 0; i < dims; ++i) {
      b.lo.c[i] = static_cast<int32_t>(-radius);
      b.hi.c[i] = static_cast<int32_t>(radius);
    }
    return b;
  }
  static Box corner(const Vertex& lo, const Vertex& hi) {
    if (lo.d != hi.d) throw std::invalid_argument("box corners disagree on dimension");
    for (int i = 0; i < lo.d; ++i)
      if (lo.c[i] > hi.c[i]) throw std::invalid_argument("empty box");
    Box b;
    b.lo = lo;
    b.hi = hi;
    return b;
  }

  int64_t extent(int i) const { return static_cast<int64_t>(hi.c[i]) - lo.c[i] + 1; }

  bool contains(const Vertex& v) const {
    if (v.d != dims()) return false;
    for (int i = 0; i < dims(); ++i)
      if (v.c[i] < lo.c[i] || v.c[i] > hi.c[i]) return false;
    return true;
  }

  int64_t vertex_count() const {
    int64_t n = 1;
    for (int i = 0; i < dims(); ++i) n *= extent(i);
    return n;
  }

  bool on_boundary(const Vertex& v) const {
    for (int i = 0; i < dims(); ++i)
      if (v.c[i] == lo.c[i] || v.c[i] == hi.c[i]) return true;
    return false;
  }
};

// Row-major linear indexing of a box; vertex order equals lexicographic
// order on coordinates.  Edges are keyed by (lower endpoint, axis): slot =
// vertex_index * d + axis, valid when the lower endpoint is not on the hi
// face of that axis.  Slot order is the deterministic total edge order used
// everywhere (orderings, tie-breaks, serialization).
class VertexIndexer {
 public:
  explicit VertexIndexer(const Box& box) : box_(box) {
    const int d = box.dims();
    int64_t s = 1;
    for (int i = d - 1; i >= 0; --i) {
      stride_[i] = s;
      s *= box.extent(i);
    }
    n_vertices_ = s;
    if (n_vertices_ > (int64_t(1) << 40)) throw std::invalid_argument("box too large to index");
  }

  const Box& box() const { return box_; }
  int dims() const { return box_.dims(); }
  int64_t vertex_count() const { return n_vertices_; }
  int64_t edge_slot_count() const { return n_vertices_ * dims(); }
  int64_t stride(int axis) const { return stride_[axis]; }

  int64_t index(const Vertex& v) const {
    int64_t idx = 0;
    for (int i = 0; i < dims(); ++i) idx += (static_cast<int64_t>(v.c[i]) - box_.lo.c[i]) * stride_[i];
    return idx;
  }

  Vertex vertex(int64_t idx) const {
    Vertex v;
    v.d = dims();
    for (int i = 0; i < dims(); ++i) {
      v.c[i] = static_cast<int32_t>(box_.lo.c[i] + idx / stride_[i] % box_.extent(i));
    }
    return v;
  }

  int32_t coord(int64_t idx, int axis) const {
    return static_cast<int32_t>(box_.lo.c[axis] + idx / stride_[axis] % box_.extent(axis));
  }

  bool slot_valid(int64_t slot) const {
    const int axis = static_cast<int>(slot % dims());
    const int64_t v = slot / dims();
    return coord(v, axis) < box_.hi.c[axis];
  }

  int64_t slot_of(const Vertex& lower, int axis) const { return index(lower) * dims() + axis; }

  Edge slot_edge(int64_t slot) const {
    const int axis = static_cast<int>(slot % dims());
    Vertex a = vertex(slot / dims());
    Vertex b = a;
    b.c[axis] += 1;
    return Edge{a, b};
  }

  // Endpoints as vertex indices.
  std::pair<int64_t, int64_t> slot_endpoints(int64_t slot) const {
    const int axis = static_cast<int>(slot % dims());
    const int64_t u = slot / dims();
    return {u, u + stride_[axis]};
  }

 private:
  Box box_;
  std::array<int64_t, kMaxDims> stride_{};
  int64_t n_vertices_ = 0;
};

// Geometric scale ladder: level j covers the centered box of radius base^j.
struct ScaleParams {
  int64_t base = 4;  // growth factor between consecutive levels
  int levels = 1;    // number of levels; the ambient box has radius base^levels

  void check() const {
    if (base < 2) throw std::invalid_argument("scale base must be >= 2");
    if (levels < 1 || levels > 40) throw std::invalid_argument("scale levels out of range");
    double r = std::pow(static_cast<double>(base), levels);
    if (r > 1e9) throw std::invalid_argument("scale ladder exceeds indexable radius");
  }

  int64_t radius(int j) const {
    int64_t r = 1;
    for (int i = 0; i < j; ++i) r *= base;
    return r;
  }
};

inline Box scale_box(const ScaleParams& p, int j, int dims) {
  if (j < 1 || j > p.levels) throw std::out_of_range("scale level out of range");
  return Box::centered(dims, p.radius(j));
}

// Level of the smallest centered box containing both endpoints; levels
// partition the ambient edge set into nested shells.
inline int shell_of_edge(const ScaleParams& p, const Vertex& a, const Vertex& b) {
  const int32_t m = std::max(a.norm_inf(), b.norm_inf());
  for (int j = 1; j <= p.levels; ++j)
    if (m <= p.radius(j)) return j;
  throw std::out_of_range("edge lies outside the ambient box");
}

// Largest j with base^j <= |x|_inf (so x sits between levels j and j+1).
inline int scale_index(const ScaleParams& p, const Vertex& x) {
  const int32_t m = x.norm_inf();
  if (m < 1) throw std::invalid_argument("scale index undefined at the origin");
  int j = 0;
  while (j + 1 <= 62 && p.radius(j + 1) <= m) ++j;
  return j;
}

std::vector<Edge> box_edges(const ScaleParams& p, int j, int dims);
std::vector<Edge> shell_edges(const ScaleParams& p, int j, int dims);

// Cylinder around the infinite line through 0 and target, of given width.
struct CylinderSpec {
  Vertex target;
  double alpha = 0.25;
  double width = 0;  // |target|_2 ^ alpha unless overridden
};

inline CylinderSpec make_cylinder(const Vertex& target, double alpha) {
  if (target.is_zero()) throw std::invalid_argument("cylinder axis needs a nonzero target");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("cylinder exponent must lie in (0,1)");
  CylinderSpec s;
  s.target = target;
  s.alpha = alpha;
  s.width = std::pow(target.norm_two(), alpha);
  return s;
}

// Euclidean distance from v to the axis line, compared against width.
// Inner products of int32 coordinates are exact in double, so boundary
// vertices (distance == width) are classified exactly whenever width^2 is
// representable, and the test is symmetric under v -> -v.
inline bool cylinder_contains(const CylinderSpec& s, const Vertex& v) {
  if (v.d != s.target.d) throw std::invalid_argument("cylinder/vertex dimension mismatch");
  double vv = 0, tt = 0, vt = 0;
  for (int i = 0; i < v.d; ++i) {
    const double a = v.c[i], b = s.target.c[i];
    vv += a * a;
    tt += b * b;
    vt += a * b;
  }
  const double dist2 = vv - vt * vt / tt;
  return dist2 <= s.width * s.width;
}

}  // namespace fpplab
