#pragma once

#include "spectraph/distance_matrix.hpp"
#include "spectraph/knn_graph.hpp"

#include <limits>

namespace spectraph {

DistanceMatrix euclidean(const PointCloud& pc);

/// 1 - Pearson correlation between the coordinate vectors of two points.
DistanceMatrix correlation_distance(const PointCloud& pc);

enum class FermatGraph { complete, knn };

/// All-pairs shortest paths with edge weights d^p, on the complete graph or on
/// the symmetric kNN graph (unreachable pairs stay kUnreachable). Relaxations that
/// improve a path by less than 1e-12 relative are treated as ties.
DistanceMatrix fermat(const DistanceMatrix& base, double p, FermatGraph graph = FermatGraph::complete,
                      std::size_t k = 0);

inline constexpr double kInfinityParam = std::numeric_limits<double>::infinity();

/// Distance-to-measure values: (mean_kappa ||x_i - x_{i_kappa}||^p)^{1/p}, or the
/// distance to the k-th neighbor for p = inf.
Vector dtm_values(const DistanceMatrix& base, std::size_t k, double p);

/// DTM-filtration distances for xi in {1, 2, inf}.
DistanceMatrix dtm(const DistanceMatrix& base, std::size_t k, double p, double xi);

/// max(d_ij, r_k(i), r_k(j)) off the diagonal, r_k = distance to the k-th neighbor.
DistanceMatrix core_distance(const DistanceMatrix& base, std::size_t k);

/// Shortest paths in the symmetric kNN graph with edges weighted by `base`.
DistanceMatrix geodesic(const DistanceMatrix& base, std::size_t k);

/// Per-point kernel scales found by bisection.
struct AffinityCalibration {
  Vector sigma;
  double target = 0.0;
  double max_residual = 0.0;
};

struct AffinityDistances {
  DistanceMatrix distances;    // -log affinity, kUnreachable where the affinity is 0
  Matrix affinity;             // symmetric affinities
  AffinityCalibration calibration;
};

/// t-SNE input affinities on the k = floor(3 * perplexity) nearest neighbors,
/// symmetrized as (p_{i|j} + p_{j|i}) / 2n; distances are -log p_ij.
AffinityDistances tsne_graph_distance(const DistanceMatrix& base, double perplexity);

/// UMAP fuzzy-union memberships mu_ij = mu_{i|j} + mu_{j|i} - mu_{i|j} mu_{j|i};
/// distances are -log mu_ij.
AffinityDistances umap_graph_distance(const DistanceMatrix& base, std::size_t k);

/// Centered data projected on the leading principal directions: columns of U S
/// (standard) or of U (normalized).
PointCloud pca_preprocess(const PointCloud& pc, std::size_t n_components, bool normalized);

/// Replaces every kUnreachable entry by twice the largest finite off-diagonal entry.
DistanceMatrix finitize(const DistanceMatrix& dist);

}  // namespace spectraph
