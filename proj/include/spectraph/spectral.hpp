#pragma once

#include "spectraph/distance_matrix.hpp"
#include "spectraph/knn_graph.hpp"

namespace spectraph {

/// Full eigendecomposition of L_sym = I - D^{-1/2} A D^{-1/2}.
struct SpectralDecomposition {
  Vector eigenvalues;        // ascending
  Eigen::MatrixXd vectors;   // column l is u_l, orthonormal
  Vector degrees;
  double volume = 0.0;
  std::size_t component_count = 0;
  std::vector<std::size_t> component_labels;

  std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
  /// Largest eigenvalue within 1e-9 of 2: the graph has a bipartite component.
  bool near_bipartite() const { return eigenvalues[eigenvalues.size() - 1] > 2.0 - 1e-9; }
};

/// Dense symmetric eigensolver. Throws if the residual exceeds 1e-6 or the
/// zero eigenvalues do not match the component count.
SpectralDecomposition eigendecompose(const NeighborGraph& g);

enum class DiffusionRoute { transition_matrix, spectral };

/// sqrt(vol) * ||(P^t_i - P^t_j) D^{-1/2}||. The transition-matrix route needs an
/// integer t; the spectral route accepts any real t >= 0.
DistanceMatrix diffusion_distance(const NeighborGraph& g, double t, DiffusionRoute route);
DistanceMatrix diffusion_distance(const SpectralDecomposition& dec, double t);

/// vol * sum_l (1 - mu_l)^{2t} (u_li/sqrt(d_i) - u_lj/sqrt(d_j))^2, without the
/// square root. For odd 2t the weights may be negative and so may the entries;
/// non-integer 2t with a negative base is a domain error.
Matrix diffusion_distance_squared(const SpectralDecomposition& dec, double t);

enum class NaiveResistanceRoute { pseudoinverse, spectral };
enum class CorrectedResistanceRoute { correction_formula, spectral };

/// (H_ij + H_ji) / vol per connected component, as squared distances.
/// Pairs in different components get kUnreachable.
DistanceMatrix effective_resistance_naive(const NeighborGraph& g, NaiveResistanceRoute route);
DistanceMatrix effective_resistance_naive(const SpectralDecomposition& dec);

/// Naive resistance minus 1/d_i + 1/d_j - 2 a_ij/(d_i d_j). With `take_sqrt` the
/// element-wise square root is returned instead of squared distances.
DistanceMatrix effective_resistance_corrected(const NeighborGraph& g, CorrectedResistanceRoute route,
                                              bool take_sqrt = false);
DistanceMatrix effective_resistance_corrected(const SpectralDecomposition& dec, bool take_sqrt = false);

/// Euclidean distances between rows of (u_{K+1}, ..., u_{K+dim}).
DistanceMatrix laplacian_eigenmaps_distance(const SpectralDecomposition& dec, std::size_t embed_dim);

enum class DptVariant { rw, sym, symd };
DptVariant parse_dpt_variant(std::string_view name);

/// Diffusion pseudotime: ||e_i - e_j|| with e_i = ((1-mu_l)/mu_l * v_{l,i})_{l>=2}.
/// rw: v_l = D^{-1/2}u_l / ||D^{-1/2}u_l||, sym: v_l = u_l, symd: v_l = D^{-1/2}u_l.
DistanceMatrix dpt_distance(const SpectralDecomposition& dec, DptVariant variant);

/// Probabilities below this are clamped before taking the logarithm.
inline constexpr double kPotentialFloor = 1e-12;

/// || log P^t_i - log P^t_j || with element-wise log.
DistanceMatrix potential_distance(const NeighborGraph& g, int t);

}  // namespace spectraph
