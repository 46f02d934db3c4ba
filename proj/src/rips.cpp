#include "spectraph/rips.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <unordered_map>

namespace spectraph {

namespace {

using Index = std::int64_t;

struct Entry {
  double diam;
  Index index;
};

// Reverse filtration order: larger diameter first, then smaller index.
struct ReverseFiltration {
  bool operator()(const Entry& a, const Entry& b) const {
    return a.diam > b.diam || (a.diam == b.diam && a.index < b.index);
  }
};

// Max-heap on ReverseFiltration: the top is the earliest entry in filtration order.
using WorkingColumn = std::priority_queue<Entry, std::vector<Entry>, ReverseFiltration>;

class BinomialTable {
 public:
  BinomialTable(std::size_t n, std::size_t k) : k_(k + 1), table_((n + 1) * (k + 1), 0) {
    for (std::size_t i = 0; i <= n; ++i) {
      at(i, 0) = 1;
      for (std::size_t j = 1; j <= std::min(i, k); ++j)
        at(i, j) = at(i - 1, j - 1) + (j < i ? at(i - 1, j) : 0);
    }
  }
  Index operator()(std::size_t n, std::size_t k) const { return k > n ? 0 : table_[n * k_ + k]; }

 private:
  Index& at(std::size_t n, std::size_t k) { return table_[n * k_ + k]; }
  std::size_t k_;
  std::vector<Index> table_;
};

class RipsEngine {
 public:
  RipsEngine(const DistanceMatrix& dist, int max_dim, double threshold)
      : d_(dist), n_(dist.size()), max_dim_(max_dim), threshold_(threshold), binom_(n_, max_dim + 2) {}

  PersistenceDiagram run(bool include_h0) {
    std::vector<Entry> edges, columns;
    compute_h0(edges, columns, include_h0);
    std::vector<Entry> simplices = std::move(edges);
    for (int dim = 1; dim <= max_dim_; ++dim) {
      std::unordered_map<Index, std::size_t> pivots;
      reduce(dim, columns, pivots);
      if (dim < max_dim_) {
        std::vector<Entry> next;
        assemble(dim, simplices, pivots, next, columns);
        simplices = std::move(next);
      }
    }
    PersistenceDiagram out;
    out.features = std::move(features_);
    out.max_dim = max_dim_;
    out.threshold = threshold_;
    out.includes_h0 = include_h0;
    return out;
  }

  // Vertices of the dim-simplex with the given index, in descending order.
  std::vector<std::size_t> vertices(Index index, int dim) const {
    std::vector<std::size_t> out(static_cast<std::size_t>(dim) + 1);
    std::size_t v = n_ - 1;
    for (int k = dim + 1; k >= 1; --k) {
      while (binom_(v, static_cast<std::size_t>(k)) > index) --v;
      out[static_cast<std::size_t>(dim + 1 - k)] = v;
      index -= binom_(v, static_cast<std::size_t>(k));
    }
    return out;
  }

 private:
  Index edge_index(std::size_t i, std::size_t j) const { return binom_(i, 2) + static_cast<Index>(j); }

  // Calls f(cofacet) for every cofacet within the threshold. With `upper_only`,
  // only cofacets adding a vertex above the current top vertex are produced.
  template <class F>
  void for_each_cofacet(const Entry& s, int dim, bool upper_only, F&& f) const {
    const std::vector<std::size_t> vs = vertices(s.index, dim);
    const auto k = static_cast<std::size_t>(dim);
    Index above = 0, below = s.index;
    std::size_t p = 0;
    for (std::size_t j = n_; j-- > 0;) {
      if (p <= k && vs[p] == j) {
        if (upper_only) return;
        below -= binom_(j, k + 1 - p);
        above += binom_(j, k + 2 - p);
        ++p;
        continue;
      }
      double diam = s.diam;
      for (std::size_t u : vs) diam = std::max(diam, d_(j, u));
      if (diam > threshold_) continue;
      f(Entry{diam, above + binom_(j, k + 2 - p) + below});
    }
  }

  void compute_h0(std::vector<Entry>& edges, std::vector<Entry>& columns, bool include_h0) {
    for (std::size_t i = 1; i < n_; ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (d_(i, j) <= threshold_) edges.push_back({d_(i, j), edge_index(i, j)});
    std::sort(edges.begin(), edges.end(), [](const Entry& a, const Entry& b) { return ReverseFiltration{}(b, a); });

    std::vector<std::size_t> parent(n_);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const Entry& e : edges) {
      const auto vs = vertices(e.index, 1);
      std::size_t a = find(vs[0]), b = find(vs[1]);
      if (a == b) {
        columns.push_back(e);
        continue;
      }
      // Every vertex is born at 0; the component with the larger root index dies.
      if (a < b) std::swap(a, b);
      parent[a] = b;
      if (include_h0 && e.diam > 0) features_.push_back({0, 0.0, e.diam, {}});
    }
    if (include_h0)
      for (std::size_t v = 0; v < n_; ++v)
        if (find(v) == v) features_.push_back({0, 0.0, kUnreachable, {}});
    std::sort(columns.begin(), columns.end(), ReverseFiltration{});
  }

  // Pops entries, cancelling equal pairs; returns the earliest surviving entry.
  static std::optional<Entry> pop_pivot(WorkingColumn& column) {
    while (!column.empty()) {
      Entry p = column.top();
      column.pop();
      if (!column.empty() && column.top().index == p.index) {
        column.pop();
        continue;
      }
      return p;
    }
    return std::nullopt;
  }

  void reduce(int dim, const std::vector<Entry>& columns, std::unordered_map<Index, std::size_t>& pivots) {
    // reduction[c] lists the simplices added to column c besides columns[c].
    std::vector<std::vector<Entry>> reduction(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const Entry& sigma = columns[c];
      WorkingColumn work;
      std::vector<Entry> added;
      for_each_cofacet(sigma, dim, false, [&](const Entry& e) { work.push(e); });
      while (true) {
        std::optional<Entry> pivot = pop_pivot(work);
        if (!pivot) {
          features_.push_back({dim, sigma.diam, kUnreachable, vertices(sigma.index, dim)});
          break;
        }
        auto hit = pivots.find(pivot->index);
        if (hit == pivots.end()) {
          pivots.emplace(pivot->index, c);
          if (pivot->diam > sigma.diam)
            features_.push_back({dim, sigma.diam, pivot->diam, vertices(sigma.index, dim)});
          reduction[c] = compress(std::move(added));
          break;
        }
        work.push(*pivot);
        const std::size_t other = hit->second;
        added.push_back(columns[other]);
        added.insert(added.end(), reduction[other].begin(), reduction[other].end());
        for_each_cofacet(columns[other], dim, false, [&](const Entry& e) { work.push(e); });
        for (const Entry& s : reduction[other]) for_each_cofacet(s, dim, false, [&](const Entry& e) { work.push(e); });
      }
    }
  }

  // GF(2) sum: entries appearing an even number of times cancel.
  static std::vector<Entry> compress(std::vector<Entry> v) {
    std::sort(v.begin(), v.end(), [](const Entry& a, const Entry& b) { return a.index < b.index; });
    std::vector<Entry> out;
    for (std::size_t i = 0; i < v.size();) {
      std::size_t j = i;
      while (j < v.size() && v[j].index == v[i].index) ++j;
      if ((j - i) % 2 == 1) out.push_back(v[i]);
      i = j;
    }
    return out;
  }

  void assemble(int dim, const std::vector<Entry>& simplices, const std::unordered_map<Index, std::size_t>& pivots,
                std::vector<Entry>& next, std::vector<Entry>& columns) const {
    columns.clear();
    for (const Entry& s : simplices) {
      for_each_cofacet(s, dim, true, [&](const Entry& e) {
        next.push_back(e);
        if (!pivots.count(e.index)) columns.push_back(e);
      });
    }
    std::sort(columns.begin(), columns.end(), ReverseFiltration{});
  }

  const DistanceMatrix& d_;
  std::size_t n_;
  int max_dim_;
  double threshold_;
  BinomialTable binom_;
  std::vector<PersistenceFeature> features_;
};

void validate_input(const DistanceMatrix& dist) {
  const std::size_t n = dist.size();
  if (n == 0) throw std::invalid_argument("empty distance matrix");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double v = dist(i, j);
      if (!std::isfinite(v)) throw std::invalid_argument("persistence needs finite distances; finitize first");
      if (v < 0) throw std::invalid_argument("negative distance at (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
}

// Gaussian elimination over GF(2) on bit-packed columns.
std::size_t gf2_rank(std::vector<std::vector<std::uint64_t>> cols) {
  std::size_t rank = 0;
  std::vector<std::vector<std::uint64_t>> basis;  // reduced columns keyed by lowest set bit
  std::vector<std::size_t> lows;
  auto low = [](const std::vector<std::uint64_t>& c) -> std::ptrdiff_t {
    for (std::size_t w = c.size(); w-- > 0;)
      if (c[w]) return static_cast<std::ptrdiff_t>(w * 64 + 63 - static_cast<std::size_t>(__builtin_clzll(c[w])));
    return -1;
  };
  for (auto& c : cols) {
    while (true) {
      const auto l = low(c);
      if (l < 0) break;
      auto it = std::find(lows.begin(), lows.end(), static_cast<std::size_t>(l));
      if (it == lows.end()) {
        lows.push_back(static_cast<std::size_t>(l));
        basis.push_back(c);
        ++rank;
        break;
      }
      const auto& b = basis[static_cast<std::size_t>(it - lows.begin())];
      for (std::size_t w = 0; w < c.size(); ++w) c[w] ^= b[w];
    }
  }
  return rank;
}

}  // namespace

std::vector<PersistenceFeature> PersistenceDiagram::of_dim(int dim) const {
  std::vector<PersistenceFeature> out;
  for (const auto& f : features)
    if (f.dim == dim) out.push_back(f);
  return out;
}

std::vector<double> PersistenceDiagram::persistences(int dim) const {
  std::vector<double> out;
  for (const auto& f : features)
    if (f.dim == dim) out.push_back(f.persistence());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

double enclosing_radius(const DistanceMatrix& dist) {
  double best = kUnreachable;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < dist.size(); ++j) row = std::max(row, dist(i, j));
    best = std::min(best, row);
  }
  return best;
}

PersistenceDiagram rips_persistence(const DistanceMatrix& dist, const RipsOptions& options) {
  if (options.max_dim < 1 || options.max_dim > 2) throw std::invalid_argument("max_dim must be 1 or 2");
  validate_input(dist);
  const double threshold = options.threshold.value_or(enclosing_radius(dist));
  if (!(threshold >= 0)) throw std::invalid_argument("threshold must be non-negative");
  PersistenceDiagram diagram = RipsEngine(dist, options.max_dim, threshold).run(options.include_h0);
  std::stable_sort(diagram.features.begin(), diagram.features.end(),
                   [](const PersistenceFeature& a, const PersistenceFeature& b) {
                     if (a.dim != b.dim) return a.dim < b.dim;
                     if (a.persistence() != b.persistence()) return a.persistence() > b.persistence();
                     return a.birth < b.birth;
                   });
  return diagram;
}

std::vector<std::size_t> brute_force_betti(const DistanceMatrix& dist, double tau, int max_dim) {
  const std::size_t n = dist.size();
  if (n > 10) throw std::invalid_argument("brute_force_betti supports at most 10 points");
  if (max_dim < 0 || max_dim > 2) throw std::invalid_argument("max_dim must be 0, 1 or 2");

  // simplices[k]: vertex sets (bitmasks) of the k-simplices with diameter <= tau.
  std::vector<std::vector<unsigned>> simplices(static_cast<std::size_t>(max_dim) + 2);
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    const int size = __builtin_popcount(mask);
    if (size > max_dim + 2) continue;
    bool inside = true;
    for (std::size_t i = 0; i < n && inside; ++i)
      for (std::size_t j = 0; j < i && inside; ++j)
        if ((mask >> i & 1u) && (mask >> j & 1u) && dist(i, j) > tau) inside = false;
    if (inside) simplices[static_cast<std::size_t>(size - 1)].push_back(mask);
  }

  // rank of the boundary map from k-simplices to (k-1)-simplices
  auto boundary_rank = [&](std::size_t k) -> std::size_t {
    if (k == 0 || simplices[k].empty()) return 0;
    const auto& faces = simplices[k - 1];
    const std::size_t words = (faces.size() + 63) / 64;
    std::vector<std::vector<std::uint64_t>> cols;
    for (unsigned s : simplices[k]) {
      std::vector<std::uint64_t> col(words, 0);
      for (std::size_t v = 0; v < n; ++v) {
        if (!(s >> v & 1u)) continue;
        const auto pos = static_cast<std::size_t>(
            std::lower_bound(faces.begin(), faces.end(), s & ~(1u << v)) - faces.begin());
        col[pos / 64] |= std::uint64_t{1} << (pos % 64);
      }
      cols.push_back(std::move(col));
    }
    return gf2_rank(std::move(cols));
  };

  std::vector<std::size_t> ranks(simplices.size() + 1, 0);
  for (std::size_t k = 0; k < simplices.size(); ++k) ranks[k] = boundary_rank(k);
  std::vector<std::size_t> betti;
  for (std::size_t k = 0; k <= static_cast<std::size_t>(max_dim); ++k)
    betti.push_back(simplices[k].size() - ranks[k] - ranks[k + 1]);
  return betti;
}

std::size_t betti_at(const PersistenceDiagram& diagram, int dim, double tau) {
  std::size_t count = 0;
  for (const auto& f : diagram.features)
    if (f.dim == dim && f.birth <= tau && tau < f.death) ++count;
  return count;
}

std::vector<Edge> representative_cycle(const DistanceMatrix& dist, const PersistenceFeature& feature) {
  if (feature.dim != 1) throw std::invalid_argument("representative cycles are only available for H1 features");
  if (feature.birth_simplex.size() != 2) throw std::invalid_argument("feature carries no birth edge");
  const std::size_t n = dist.size();
  const std::size_t a = feature.birth_simplex[0], b = feature.birth_simplex[1];
  const double birth = dist(a, b);
  const std::int64_t birth_index = static_cast<std::int64_t>(a * (a - 1) / 2 + b);
  // An edge precedes the birth edge in the filtration: smaller diameter, or equal
  // diameter and larger combinatorial index.
  auto earlier = [&](std::size_t i, std::size_t j) {
    if (i < j) std::swap(i, j);
    const double d = dist(i, j);
    return d < birth || (d == birth && static_cast<std::int64_t>(i * (i - 1) / 2 + j) > birth_index);
  };

  std::vector<double> best(n, kUnreachable);
  std::vector<std::size_t> prev(n, n);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  best[a] = 0.0;
  heap.emplace(0.0, a);
  while (!heap.empty()) {
    auto [du, u] = heap.top();
    heap.pop();
    if (du > best[u]) continue;
    if (u == b) break;
    for (std::size_t v = 0; v < n; ++v) {
      if (v == u || !earlier(u, v)) continue;
      const double cand = du + dist(u, v);
      if (cand < best[v]) {
        best[v] = cand;
        prev[v] = u;
        heap.emplace(cand, v);
      }
    }
  }
  if (std::isinf(best[b])) throw std::runtime_error("birth edge endpoints are not connected before the birth");
  std::vector<Edge> cycle{{a, b}};
  for (std::size_t v = b; v != a; v = prev[v]) cycle.emplace_back(prev[v], v);
  return cycle;
}

void write_diagram_csv(std::ostream& out, const PersistenceDiagram& diagram) {
  out << "# spectraph-diagram v1\n";
  out << "dim,birth,death\n";
  for (const auto& f : diagram.features)
    out << f.dim << ',' << detail::format_double(f.birth) << ',' << detail::format_double(f.death) << '\n';
}

PersistenceDiagram read_diagram_csv(std::istream& in) {
  PersistenceDiagram diagram;
  diagram.max_dim = 0;
  std::string line;
  bool header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!header) {
      if (t != "dim,birth,death") throw std::runtime_error("diagram CSV: expected header 'dim,birth,death'");
      header = true;
      continue;
    }
    const auto cells = detail::split(t, ',');
    const auto dim = cells.size() == 3 ? detail::parse_double(cells[0]) : std::nullopt;
    const auto birth = cells.size() == 3 ? detail::parse_double(cells[1]) : std::nullopt;
    const auto death = cells.size() == 3 ? detail::parse_double(cells[2]) : std::nullopt;
    if (!dim || !birth || !death || *dim < 0 || *dim > 2 || *dim != std::floor(*dim))
      throw std::runtime_error("diagram CSV: malformed row at line " + std::to_string(lineno));
    const int k = static_cast<int>(*dim);
    if (k == 0) diagram.includes_h0 = true;
    diagram.max_dim = std::max(diagram.max_dim, k);
    diagram.features.push_back({k, *birth, *death, {}});
  }
  if (!header) throw std::runtime_error("diagram CSV: missing header");
  return diagram;
}

void save_diagram_csv(const std::string& path, const PersistenceDiagram& diagram) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_diagram_csv(out, diagram);
}

PersistenceDiagram load_diagram_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_diagram_csv(in);
}

void write_cycles_csv(std::ostream& out, const std::vector<std::pair<std::size_t, std::vector<Edge>>>& cycles) {
  out << "# spectraph-cycles v1\n";
  out << "feature_id,u,v\n";
  for (const auto& [id, edges] : cycles)
    for (const auto& [u, v] : edges) out << id << ',' << u << ',' << v << '\n';
}

}  // namespace spectraph
