#include "spectraph/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <string>

namespace spectraph {

namespace {

constexpr double kZeroEigenvalue = 1e-9;

// Squared distances between embedding rows, cross-component pairs unreachable.
DistanceMatrix within_components(Matrix sq, const std::vector<std::size_t>& labels, bool squared) {
  const auto n = sq.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (labels[i] != labels[j]) sq(i, j) = kUnreachable;
  return DistanceMatrix(std::move(sq), squared);
}

Matrix clamp_nonnegative(Matrix m) {
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (m.data()[i] < 0) m.data()[i] = 0.0;
  return m;
}

// D^{-1/2} U restricted to columns [first, n), each column scaled by weights[l].
Matrix scaled_embedding(const SpectralDecomposition& dec, std::size_t first, const Vector& weights) {
  const auto n = static_cast<Eigen::Index>(dec.size());
  Matrix e(n, n - static_cast<Eigen::Index>(first));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = 1.0 / std::sqrt(dec.degrees[i]);
    for (Eigen::Index l = static_cast<Eigen::Index>(first); l < n; ++l)
      e(i, l - static_cast<Eigen::Index>(first)) = weights[l] * dec.vectors(i, l) * s;
  }
  return e;
}

Matrix matrix_power(const Matrix& p, long long t) {
  Matrix result = Matrix::Identity(p.rows(), p.cols());
  Matrix base = p;
  while (t > 0) {
    if (t & 1) result = result * base;
    t >>= 1;
    if (t > 0) base = base * base;
  }
  return result;
}

bool is_integer(double x) { return std::floor(x) == x; }

}  // namespace

SpectralDecomposition eigendecompose(const NeighborGraph& g) {
  const Laplacians lap = laplacians(g);
  const Eigen::MatrixXd lsym = lap.normalized;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lsym);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed to converge");

  SpectralDecomposition dec;
  dec.eigenvalues = solver.eigenvalues();
  dec.vectors = solver.eigenvectors();
  dec.degrees = g.degrees();
  dec.volume = g.volume();
  dec.component_count = g.component_count();
  dec.component_labels = g.components().labels;

  const double residual = (lsym * dec.vectors - dec.vectors * dec.eigenvalues.asDiagonal()).cwiseAbs().maxCoeff();
  if (residual > 1e-6)
    throw std::runtime_error("eigendecomposition residual " + std::to_string(residual) + " exceeds 1e-6");

  const std::size_t k = dec.component_count;
  if (std::abs(dec.eigenvalues[static_cast<Eigen::Index>(k) - 1]) >= kZeroEigenvalue ||
      (k < dec.size() && dec.eigenvalues[static_cast<Eigen::Index>(k)] <= kZeroEigenvalue))
    throw std::runtime_error("number of zero eigenvalues does not match the component count");
  // Snap the kernel to exact zeros; every formula below treats them as such.
  for (std::size_t l = 0; l < k; ++l) dec.eigenvalues[static_cast<Eigen::Index>(l)] = 0.0;
  return dec;
}

Matrix diffusion_distance_squared(const SpectralDecomposition& dec, double t) {
  if (!(t >= 0)) throw std::invalid_argument("diffusion time must be non-negative");
  const auto n = static_cast<Eigen::Index>(dec.size());
  const double exponent = 2 * t;
  Vector pos = Vector::Zero(n), neg = Vector::Zero(n);
  for (Eigen::Index l = 0; l < n; ++l) {
    const double base = 1.0 - dec.eigenvalues[l];
    if (base < 0 && !is_integer(exponent))
      throw std::domain_error("diffusion time " + std::to_string(t) + " needs a non-negative spectrum of A_sym");
    const double w = std::pow(base, exponent);
    (w >= 0 ? pos : neg)[l] = std::sqrt(std::abs(w));
  }
  Matrix sq = pairwise_euclidean(scaled_embedding(dec, 0, pos), true).values();
  if (neg.any()) sq -= pairwise_euclidean(scaled_embedding(dec, 0, neg), true).values();
  return dec.volume * sq;
}

DistanceMatrix diffusion_distance(const SpectralDecomposition& dec, double t) {
  Matrix sq = clamp_nonnegative(diffusion_distance_squared(dec, t));
  return DistanceMatrix(sq.array().sqrt().matrix(), false);
}

DistanceMatrix diffusion_distance(const NeighborGraph& g, double t, DiffusionRoute route) {
  if (!(t >= 0)) throw std::invalid_argument("diffusion time must be non-negative");
  if (route == DiffusionRoute::spectral) return diffusion_distance(eigendecompose(g), t);
  if (!is_integer(t)) throw std::invalid_argument("transition-matrix route needs an integer diffusion time");
  const Laplacians lap = laplacians(g);
  Matrix rows = matrix_power(lap.transition, static_cast<long long>(t));
  rows = rows * g.degrees().array().rsqrt().matrix().asDiagonal();
  Matrix d = pairwise_euclidean(rows, false).values();
  return DistanceMatrix(std::sqrt(g.volume()) * d, false);
}

DistanceMatrix effective_resistance_naive(const SpectralDecomposition& dec) {
  const auto n = static_cast<Eigen::Index>(dec.size());
  Vector w = Vector::Zero(n);
  for (Eigen::Index l = static_cast<Eigen::Index>(dec.component_count); l < n; ++l)
    w[l] = 1.0 / std::sqrt(dec.eigenvalues[l]);
  Matrix sq = pairwise_euclidean(scaled_embedding(dec, dec.component_count, w), true).values();
  return within_components(std::move(sq), dec.component_labels, true);
}

DistanceMatrix effective_resistance_naive(const NeighborGraph& g, NaiveResistanceRoute route) {
  if (route == NaiveResistanceRoute::spectral) return effective_resistance_naive(eigendecompose(g));
  require_no_isolated_nodes(g);
  const Laplacians lap = laplacians(g);
  const auto n = static_cast<Eigen::Index>(g.size());
  const Components& comp = g.components();
  Matrix out = Matrix::Constant(n, n, kUnreachable);
  std::vector<std::vector<Eigen::Index>> members(comp.count);
  for (Eigen::Index i = 0; i < n; ++i) members[comp.labels[i]].push_back(i);
  for (const auto& idx : members) {
    const auto m = static_cast<Eigen::Index>(idx.size());
    // L^+ = (L + J/m)^{-1} - J/m on a connected component.
    Eigen::MatrixXd lc(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b < m; ++b) lc(a, b) = lap.combinatorial(idx[a], idx[b]) + 1.0 / m;
    Eigen::MatrixXd pinv = lc.ldlt().solve(Eigen::MatrixXd::Identity(m, m));
    pinv.array() -= 1.0 / m;
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b < m; ++b)
        out(idx[a], idx[b]) = a == b ? 0.0 : std::max(0.0, pinv(a, a) - 2 * pinv(a, b) + pinv(b, b));
  }
  return DistanceMatrix(std::move(out), true);
}

DistanceMatrix effective_resistance_corrected(const SpectralDecomposition& dec, bool take_sqrt) {
  const auto n = static_cast<Eigen::Index>(dec.size());
  Vector w = Vector::Zero(n);
  for (Eigen::Index l = static_cast<Eigen::Index>(dec.component_count); l < n; ++l)
    w[l] = (1.0 - dec.eigenvalues[l]) / std::sqrt(dec.eigenvalues[l]);
  Matrix sq = pairwise_euclidean(scaled_embedding(dec, dec.component_count, w), true).values();
  DistanceMatrix out = within_components(std::move(sq), dec.component_labels, true);
  return take_sqrt ? out.sqrt() : out;
}

DistanceMatrix effective_resistance_corrected(const NeighborGraph& g, CorrectedResistanceRoute route,
                                              bool take_sqrt) {
  if (route == CorrectedResistanceRoute::spectral) return effective_resistance_corrected(eigendecompose(g), take_sqrt);
  const DistanceMatrix naive = effective_resistance_naive(g, NaiveResistanceRoute::pseudoinverse);
  const auto n = static_cast<Eigen::Index>(g.size());
  const Vector& d = g.degrees();
  Matrix out = naive.values();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j || std::isinf(out(i, j))) continue;
      // a_ii = a_jj = 0: the graph has no self-loops.
      const double v = out(i, j) - 1.0 / d[i] - 1.0 / d[j] + 2.0 * g.weight(i, j) / (d[i] * d[j]);
      out(i, j) = std::max(0.0, v);
    }
  }
  DistanceMatrix res(std::move(out), true);
  return take_sqrt ? res.sqrt() : res;
}

DistanceMatrix laplacian_eigenmaps_distance(const SpectralDecomposition& dec, std::size_t embed_dim) {
  const std::size_t k = dec.component_count;
  if (embed_dim < 1 || k + embed_dim > dec.size())
    throw std::invalid_argument("embedding dimension " + std::to_string(embed_dim) + " out of range");
  Matrix e = dec.vectors.middleCols(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(embed_dim));
  return pairwise_euclidean(e, false);
}

DptVariant parse_dpt_variant(std::string_view name) {
  if (name == "rw") return DptVariant::rw;
  if (name == "sym") return DptVariant::sym;
  if (name == "symd") return DptVariant::symd;
  throw std::invalid_argument("unknown DPT variant '" + std::string(name) + "'");
}

DistanceMatrix dpt_distance(const SpectralDecomposition& dec, DptVariant variant) {
  if (dec.component_count != 1) throw std::invalid_argument("diffusion pseudotime needs a connected graph");
  const auto n = static_cast<Eigen::Index>(dec.size());
  const Vector inv_sqrt_deg = dec.degrees.array().rsqrt();
  Matrix e(n, n - 1);
  for (Eigen::Index l = 1; l < n; ++l) {
    const double mu = dec.eigenvalues[l];
    Vector v = dec.vectors.col(l);
    if (variant != DptVariant::sym) v = v.cwiseProduct(inv_sqrt_deg);
    if (variant == DptVariant::rw) v /= v.norm();
    e.col(l - 1) = ((1.0 - mu) / mu) * v;
  }
  return pairwise_euclidean(e, false);
}

DistanceMatrix potential_distance(const NeighborGraph& g, int t) {
  if (t < 1) throw std::invalid_argument("potential distance needs t >= 1");
  const Laplacians lap = laplacians(g);
  Matrix rows = matrix_power(lap.transition, t);
  rows = rows.array().max(kPotentialFloor).log().matrix();
  return pairwise_euclidean(rows, false);
}

}  // namespace spectraph
