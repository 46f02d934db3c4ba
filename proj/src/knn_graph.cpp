#include "spectraph/knn_graph.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <queue>
#include <stdexcept>

namespace spectraph {

NeighborGraph::NeighborGraph(SparseMatrix adjacency) : adjacency_(std::move(adjacency)) {
  if (adjacency_.rows() != adjacency_.cols()) throw std::invalid_argument("adjacency must be square");
  adjacency_.makeCompressed();
  const auto n = adjacency_.rows();
  degrees_ = Vector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (SparseMatrix::InnerIterator it(adjacency_, i); it; ++it) {
      if (it.col() == i && it.value() != 0.0) throw std::invalid_argument("adjacency has a self-loop");
      if (it.value() < 0) throw std::invalid_argument("adjacency has a negative weight");
      if (adjacency_.coeff(it.col(), i) != it.value()) throw std::invalid_argument("adjacency is not symmetric");
      degrees_[i] += it.value();
    }
  }
  volume_ = degrees_.sum();
  components_ = connected_components(adjacency_);
}

NeighborLists exact_knn(const DistanceMatrix& dist, std::size_t k) {
  const std::size_t n = dist.size();
  if (k < 1 || k + 1 > n)
    throw std::invalid_argument("k = " + std::to_string(k) + " out of range [1, " + std::to_string(n - 1) + "]");
  NeighborLists out(n);
  std::vector<std::size_t> order(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t w = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) order[w++] = j;
    auto closer = [&](std::size_t a, std::size_t b) {
      const double da = dist(i, a), db = dist(i, b);
      return da < db || (da == db && a < b);
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), closer);
    out[i].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return out;
}

NeighborGraph symmetric_knn_graph(const NeighborLists& neighbors, const DistanceMatrix* weights) {
  const std::size_t n = neighbors.size();
  if (weights && weights->size() != n) throw std::invalid_argument("weight matrix size does not match");
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : neighbors[i]) {
      if (j >= n || j == i) throw std::invalid_argument("invalid neighbor index");
      double w = 1.0;
      if (weights) {
        const double d = (*weights)(i, j);
        if (!(d > 0) || !std::isfinite(d))
          throw std::invalid_argument("weighted kNN graph: edge " + std::to_string(i) + "-" + std::to_string(j) +
                                      " has non-positive or infinite distance");
        w = 1.0 / d;
      }
      trip.emplace_back(i, j, w);
      trip.emplace_back(j, i, w);
    }
  }
  SparseMatrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  // Mutual neighbors appear twice; keep a single copy of the weight.
  a.setFromTriplets(trip.begin(), trip.end(), [](double x, double) { return x; });
  return NeighborGraph(std::move(a));
}

NeighborGraph knn_graph(const DistanceMatrix& dist, std::size_t k, bool weighted) {
  return symmetric_knn_graph(exact_knn(dist, k), weighted ? &dist : nullptr);
}

Components connected_components(const SparseMatrix& adjacency) {
  const auto n = static_cast<std::size_t>(adjacency.rows());
  constexpr auto kUnset = static_cast<std::size_t>(-1);
  Components c;
  c.labels.assign(n, kUnset);
  std::queue<std::size_t> q;
  for (std::size_t s = 0; s < n; ++s) {
    if (c.labels[s] != kUnset) continue;
    c.labels[s] = c.count;
    q.push(s);
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      for (SparseMatrix::InnerIterator it(adjacency, static_cast<Eigen::Index>(u)); it; ++it) {
        const auto v = static_cast<std::size_t>(it.col());
        if (it.value() != 0.0 && c.labels[v] == kUnset) {
          c.labels[v] = c.count;
          q.push(v);
        }
      }
    }
    ++c.count;
  }
  return c;
}

void require_no_isolated_nodes(const NeighborGraph& g) {
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!(g.degrees()[i] > 0)) throw std::invalid_argument("node " + std::to_string(i) + " is isolated");
}

Laplacians laplacians(const NeighborGraph& g) {
  require_no_isolated_nodes(g);
  const Matrix a = g.dense_adjacency();
  const Vector& d = g.degrees();
  const Vector inv_sqrt = d.array().rsqrt();
  Laplacians out;
  out.combinatorial = -a;
  out.combinatorial.diagonal() += d;
  out.normalized = -(inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal());
  out.normalized.diagonal().array() += 1.0;
  out.transition = d.cwiseInverse().asDiagonal() * a;
  return out;
}

void write_edge_csv(std::ostream& out, const NeighborGraph& g) {
  out << "# spectraph-edges v1\n";
  out << "i,j,weight\n";
  const auto& a = g.adjacency();
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (SparseMatrix::InnerIterator it(a, i); it; ++it)
      if (it.col() > i) out << i << ',' << it.col() << ',' << detail::format_double(it.value()) << '\n';
}

}  // namespace spectraph
