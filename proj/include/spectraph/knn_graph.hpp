#pragma once

#include "spectraph/distance_matrix.hpp"

#include <Eigen/SparseCore>

#include <iosfwd>
#include <vector>

namespace spectraph {

/// Per point, the indices of its k nearest other points in increasing distance.
using NeighborLists = std::vector<std::vector<std::size_t>>;

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct Components {
  std::vector<std::size_t> labels;  // 0..count-1, numbered by first occurrence
  std::size_t count = 0;
};

/// Undirected graph without self-loops; symmetric non-negative adjacency.
class NeighborGraph {
 public:
  /// Builds from an adjacency matrix; validates symmetry and an empty diagonal.
  explicit NeighborGraph(SparseMatrix adjacency);

  std::size_t size() const { return static_cast<std::size_t>(adjacency_.rows()); }
  const SparseMatrix& adjacency() const { return adjacency_; }
  Matrix dense_adjacency() const { return Matrix(adjacency_); }
  const Vector& degrees() const { return degrees_; }
  double volume() const { return volume_; }
  const Components& components() const { return components_; }
  std::size_t component_count() const { return components_.count; }
  double weight(std::size_t i, std::size_t j) const { return adjacency_.coeff(i, j); }
  std::size_t edge_count() const { return static_cast<std::size_t>(adjacency_.nonZeros()) / 2; }

 private:
  SparseMatrix adjacency_;
  Vector degrees_;
  double volume_ = 0.0;
  Components components_;
};

/// k nearest off-diagonal entries per row; ties go to the smaller index.
NeighborLists exact_knn(const DistanceMatrix& dist, std::size_t k);

/// Edge ij iff j is among i's neighbors or vice versa. Unit weights, or
/// 1/dist_ij when `weights` is given (zero distance on an edge is an error).
NeighborGraph symmetric_knn_graph(const NeighborLists& neighbors, const DistanceMatrix* weights = nullptr);

/// exact_knn + symmetric_knn_graph on the same distances.
NeighborGraph knn_graph(const DistanceMatrix& dist, std::size_t k, bool weighted = false);

/// Breadth-first labelling.
Components connected_components(const SparseMatrix& adjacency);
inline Components connected_components(const NeighborGraph& g) { return connected_components(g.adjacency()); }

struct Laplacians {
  Matrix combinatorial;  // L = D - A
  Matrix normalized;     // L_sym = I - D^{-1/2} A D^{-1/2}
  Matrix transition;     // P = D^{-1} A
};

/// Throws naming the first isolated node.
Laplacians laplacians(const NeighborGraph& g);
void require_no_isolated_nodes(const NeighborGraph& g);

/// "i,j,weight" rows for i < j.
void write_edge_csv(std::ostream& out, const NeighborGraph& g);

}  // namespace spectraph
