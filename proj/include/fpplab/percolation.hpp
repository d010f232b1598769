#pragma once

#include <cstdint>
#include <vector>

#include "fpplab/field.hpp"
#include "fpplab/geometry.hpp"

namespace fpplab {

// Connected components of the subgraph of edges with weight <= threshold.
// A cluster's id is the smallest vertex index it contains; "giant" is the
// largest cluster, ties resolved towards the smallest id.
struct ClusterLabeling {
  double threshold = 0;
  std::vector<int64_t> label;  // per vertex: cluster id
  int64_t giant_id = -1;
  int64_t giant_size = 0;
  int64_t vertex_count = 0;

  bool in_giant(int64_t vertex) const { return label[static_cast<size_t>(vertex)] == giant_id; }
  double giant_density() const {
    return static_cast<double>(giant_size) / static_cast<double>(vertex_count);
  }
};

ClusterLabeling open_clusters(const WeightField& field, double threshold);

// Vertex of the giant cluster closest to x in Euclidean distance, ties
// broken lexicographically on coordinates.
Vertex nearest_giant_vertex(const ClusterLabeling& labeling, const VertexIndexer& idx,
                            const Vertex& x);

// True when every lattice path from center to the boundary shell of
// [center - n, center + n] passes through a giant-cluster vertex (the shell
// being the vertices of that sub-box with a neighbour outside it).  A center
// inside the giant cluster is sheltered trivially.
bool shelter_check(const ClusterLabeling& labeling, const VertexIndexer& idx, const Vertex& center,
                   int64_t n);

}  // namespace fpplab
