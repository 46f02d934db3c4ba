#include "spectraph/basedist.hpp"

#include "spectraph/kernels.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>

namespace spectraph {

namespace {

constexpr double kSigmaLow = 1e-12;
constexpr double kSigmaHigh = 1e12;
constexpr int kBisectionSteps = 100;

void check_k(std::size_t k, std::size_t n) {
  if (k < 1 || k + 1 > n)
    throw std::invalid_argument("k = " + std::to_string(k) + " out of range for " + std::to_string(n) + " points");
}

// Single-source shortest paths for every source over an adjacency list.
DistanceMatrix all_pairs_dijkstra(const std::vector<std::vector<std::pair<std::size_t, double>>>& adj) {
  const std::size_t n = adj.size();
  Matrix out = Matrix::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), kUnreachable);
  using Item = std::pair<double, std::size_t>;
  std::vector<double> dist(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), kUnreachable);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[s] = 0.0;
    heap.emplace(0.0, s);
    while (!heap.empty()) {
      auto [du, u] = heap.top();
      heap.pop();
      if (du > dist[u]) continue;
      for (auto [v, w] : adj[u]) {
        const double cand = du + w;
        if (cand < dist[v]) {
          dist[v] = cand;
          heap.emplace(cand, v);
        }
      }
    }
    for (std::size_t j = 0; j < n; ++j) out(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(j)) = dist[j];
  }
  // Dijkstra sums edges in different orders from each end; keep the smaller.
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j) out(i, j) = out(j, i) = std::min(out(i, j), out(j, i));
  return DistanceMatrix(std::move(out), false);
}

std::vector<std::vector<std::pair<std::size_t, double>>> knn_adjacency(const DistanceMatrix& base, std::size_t k,
                                                                       const std::function<double(double)>& weight) {
  const NeighborGraph g = knn_graph(base, k, false);
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(g.size());
  for (Eigen::Index i = 0; i < g.adjacency().rows(); ++i)
    for (SparseMatrix::InnerIterator it(g.adjacency(), i); it; ++it)
      adj[static_cast<std::size_t>(i)].emplace_back(static_cast<std::size_t>(it.col()), weight(base(i, it.col())));
  return adj;
}

// Finds the scale in [kSigmaLow, kSigmaHigh] (log-space bisection) at which the
// increasing function f reaches target. Returns NaN if the target is not bracketed.
double bisect_scale(const std::function<double(double)>& f, double target, double tol) {
  double lo = std::log(kSigmaLow), hi = std::log(kSigmaHigh);
  const double f_lo = f(kSigmaLow), f_hi = f(kSigmaHigh);
  if (std::abs(f_lo - target) <= tol) return kSigmaLow;
  if (std::abs(f_hi - target) <= tol) return kSigmaHigh;
  if (f_lo > target || f_hi < target) return std::numeric_limits<double>::quiet_NaN();
  double mid = 0.5 * (lo + hi);
  for (int step = 0; step < kBisectionSteps; ++step) {
    mid = 0.5 * (lo + hi);
    const double v = f(std::exp(mid));
    if (std::abs(v - target) <= tol * 1e-6) break;
    (v < target ? lo : hi) = mid;
  }
  return std::exp(mid);
}

}  // namespace

DistanceMatrix euclidean(const PointCloud& pc) { return pairwise_euclidean(pc.points(), false); }

DistanceMatrix correlation_distance(const PointCloud& pc) {
  Matrix c = pc.points();
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    c.row(i).array() -= c.row(i).mean();
    const double norm = c.row(i).norm();
    if (!(norm > 0)) throw std::invalid_argument("point " + std::to_string(i) + " has zero coordinate variance");
    c.row(i) /= norm;
  }
  const auto n = c.rows();
  const auto dim = static_cast<std::size_t>(c.cols());
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      out(i, j) = out(j, i) = std::max(0.0, 1.0 - kernels::dot(c.row(i).data(), c.row(j).data(), dim));
  return DistanceMatrix(std::move(out), false);
}

DistanceMatrix fermat(const DistanceMatrix& base, double p, FermatGraph graph, std::size_t k) {
  if (!(p >= 1)) throw std::invalid_argument("Fermat exponent must be >= 1");
  const auto n = static_cast<Eigen::Index>(base.size());
  if (graph == FermatGraph::knn) {
    check_k(k, base.size());
    return all_pairs_dijkstra(knn_adjacency(base, k, [p](double d) { return std::pow(d, p); }));
  }
  Matrix w = p == 1.0 ? base.values() : base.values().array().pow(p).matrix();
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double wim = w(i, m);
      if (std::isinf(wim)) continue;
      double* row = w.data() + i * n;
      const double* via = w.data() + m * n;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double cand = wim + via[j];
        if (cand < row[j] * (1.0 - 1e-12)) row[j] = cand;
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j) w(i, j) = w(j, i) = std::min(w(i, j), w(j, i));
  return DistanceMatrix(std::move(w), false);
}

Vector dtm_values(const DistanceMatrix& base, std::size_t k, double p) {
  check_k(k, base.size());
  if (!(p >= 1)) throw std::invalid_argument("DTM exponent p must be >= 1");
  const NeighborLists nn = exact_knn(base, k);
  Vector out(static_cast<Eigen::Index>(base.size()));
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (std::isinf(p)) {
      out[static_cast<Eigen::Index>(i)] = base(i, nn[i].back());
      continue;
    }
    double acc = 0.0;
    for (std::size_t j : nn[i]) acc += std::pow(base(i, j), p);
    out[static_cast<Eigen::Index>(i)] = std::pow(acc / static_cast<double>(k), 1.0 / p);
  }
  return out;
}

DistanceMatrix dtm(const DistanceMatrix& base, std::size_t k, double p, double xi) {
  if (!(xi == 1.0 || xi == 2.0 || std::isinf(xi))) throw std::invalid_argument("DTM xi must be 1, 2 or inf");
  const Vector v = dtm_values(base, k, p);
  const auto n = static_cast<Eigen::Index>(base.size());
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      const double a = v[i], b = v[j], d = base(i, j);
      double r;
      if (std::isinf(xi)) {
        r = std::max({a, b, d / 2});
      } else if (xi == 1.0) {
        r = d <= std::abs(a - b) ? std::max(a, b) : (a + b + d) / 2;
      } else if (d <= std::sqrt(std::abs(a * a - b * b)) || d == 0.0) {
        r = std::max(a, b);
      } else {
        r = std::sqrt(((a + b) * (a + b) + d * d) * ((a - b) * (a - b) + d * d)) / (2 * d);
      }
      out(i, j) = out(j, i) = r;
    }
  }
  return DistanceMatrix(std::move(out), false);
}

DistanceMatrix core_distance(const DistanceMatrix& base, std::size_t k) {
  check_k(k, base.size());
  const NeighborLists nn = exact_knn(base, k);
  const auto n = static_cast<Eigen::Index>(base.size());
  Vector radius(n);
  for (Eigen::Index i = 0; i < n; ++i) radius[i] = base(i, nn[i].back());
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j) out(i, j) = out(j, i) = std::max({base(i, j), radius[i], radius[j]});
  return DistanceMatrix(std::move(out), false);
}

DistanceMatrix geodesic(const DistanceMatrix& base, std::size_t k) {
  check_k(k, base.size());
  return all_pairs_dijkstra(knn_adjacency(base, k, [](double d) { return d; }));
}

AffinityDistances tsne_graph_distance(const DistanceMatrix& base, double perplexity) {
  if (!(perplexity > 0)) throw std::invalid_argument("perplexity must be positive");
  const std::size_t n = base.size();
  const auto k = static_cast<std::size_t>(std::floor(3 * perplexity));
  check_k(k, n);
  const NeighborLists nn = exact_knn(base, k);
  const auto ni = static_cast<Eigen::Index>(n);
  Matrix cond = Matrix::Zero(ni, ni);  // cond(i, j) = p_{j|i}
  AffinityCalibration cal{Vector::Zero(ni), perplexity, 0.0};
  std::vector<double> shifted(k), w(k);

  for (std::size_t i = 0; i < n; ++i) {
    const double dmin = base(i, nn[i].front());
    for (std::size_t a = 0; a < k; ++a) {
      const double d = base(i, nn[i][a]);
      shifted[a] = d * d - dmin * dmin;
    }
    // 2^H of the conditional distribution at scale sigma; fills w with probabilities.
    auto perplexity_at = [&](double sigma) {
      double z = 0.0;
      for (std::size_t a = 0; a < k; ++a) z += (w[a] = std::exp(-shifted[a] / (2 * sigma * sigma)));
      double h = 0.0;
      for (std::size_t a = 0; a < k; ++a) {
        w[a] /= z;
        if (w[a] > 0) h -= w[a] * std::log2(w[a]);
      }
      return std::exp2(h);
    };
    double sigma = bisect_scale(perplexity_at, perplexity, 1e-4 * perplexity);
    if (std::isnan(sigma)) {
      const double dmax = base(i, nn[i].back());
      if (shifted.back() > 1e-12 * dmax * dmax)
        throw std::runtime_error("t-SNE calibration could not bracket perplexity for point " + std::to_string(i));
      // All neighbors equidistant up to rounding: use the uniform distribution.
      sigma = kSigmaHigh;
      std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(k));
    } else {
      cal.max_residual = std::max(cal.max_residual, std::abs(perplexity_at(sigma) - perplexity));
    }
    cal.sigma[static_cast<Eigen::Index>(i)] = sigma;
    for (std::size_t a = 0; a < k; ++a) cond(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(nn[i][a])) = w[a];
  }

  Matrix joint = (cond + cond.transpose()) / (2.0 * static_cast<double>(n));
  Matrix dist(ni, ni);
  for (Eigen::Index i = 0; i < ni; ++i)
    for (Eigen::Index j = 0; j < ni; ++j)
      dist(i, j) = i == j ? 0.0 : (joint(i, j) > 0 ? -std::log(joint(i, j)) : kUnreachable);
  return {DistanceMatrix(std::move(dist), false), std::move(joint), std::move(cal)};
}

AffinityDistances umap_graph_distance(const DistanceMatrix& base, std::size_t k) {
  const std::size_t n = base.size();
  check_k(k, n);
  const NeighborLists nn = exact_knn(base, k);
  const auto ni = static_cast<Eigen::Index>(n);
  const double target = std::log2(static_cast<double>(k));
  Matrix cond = Matrix::Zero(ni, ni);  // cond(i, j) = mu_{j|i}
  AffinityCalibration cal{Vector::Zero(ni), target, 0.0};
  std::vector<double> excess(k);

  for (std::size_t i = 0; i < n; ++i) {
    double rho = -1.0;
    for (std::size_t j : nn[i]) {
      if (base(i, j) > 0) {
        rho = base(i, j);
        break;
      }
    }
    if (rho < 0) throw std::runtime_error("point " + std::to_string(i) + " has no non-identical neighbor");
    for (std::size_t a = 0; a < k; ++a) excess[a] = std::max(0.0, base(i, nn[i][a]) - rho);
    auto mass_at = [&](double sigma) {
      double s = 0.0;
      for (double e : excess) s += std::exp(-e / sigma);
      return s;
    };
    const double sigma = bisect_scale(mass_at, target, 1e-6);
    if (std::isnan(sigma))
      throw std::runtime_error("UMAP calibration could not bracket log2(k) for point " + std::to_string(i));
    cal.sigma[static_cast<Eigen::Index>(i)] = sigma;
    cal.max_residual = std::max(cal.max_residual, std::abs(mass_at(sigma) - target));
    for (std::size_t a = 0; a < k; ++a)
      cond(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(nn[i][a])) = std::exp(-excess[a] / sigma);
  }

  Matrix joint(ni, ni);
  Matrix dist(ni, ni);
  for (Eigen::Index i = 0; i < ni; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double a = cond(i, j), b = cond(j, i);
      const double mu = i == j ? 0.0 : a + b - a * b;
      joint(i, j) = joint(j, i) = mu;
      dist(i, j) = dist(j, i) = i == j ? 0.0 : (mu > 0 ? std::max(0.0, -std::log(mu)) : kUnreachable);
    }
  }
  return {DistanceMatrix(std::move(dist), false), std::move(joint), std::move(cal)};
}

PointCloud pca_preprocess(const PointCloud& pc, std::size_t n_components, bool normalized) {
  if (n_components < 1 || n_components > std::min(pc.size(), pc.dim()))
    throw std::invalid_argument("n_components = " + std::to_string(n_components) + " out of range");
  Eigen::MatrixXd x = pc.points();
  x.rowwise() -= x.colwise().mean();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU);
  const auto c = static_cast<Eigen::Index>(n_components);
  Matrix out = svd.matrixU().leftCols(c);
  if (!normalized) out = out * svd.singularValues().head(c).asDiagonal();
  return PointCloud(std::move(out));
}

DistanceMatrix finitize(const DistanceMatrix& dist) {
  if (!dist.has_unreachable()) return dist;
  const double m = dist.max_finite();
  if (!std::isfinite(m)) throw std::invalid_argument("cannot finitize: no finite off-diagonal distance");
  Matrix v = dist.values();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::isinf(v.data()[i])) v.data()[i] = 2 * m;
  return DistanceMatrix(std::move(v), dist.squared());
}

}  // namespace spectraph
