#include "spectraph/distance_matrix.hpp"

#include "spectraph/kernels.hpp"
#include "text_util.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spectraph {

DistanceMatrix::DistanceMatrix(Matrix values, bool squared)
    : values_(std::move(values)), squared_(squared) {
  const auto n = values_.rows();
  if (n != values_.cols()) throw std::invalid_argument("distance matrix must be square");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (values_(i, i) != 0.0) throw std::invalid_argument("distance matrix diagonal must be zero");
    for (Eigen::Index j = 0; j < i; ++j) {
      const double a = values_(i, j), b = values_(j, i);
      if (std::isnan(a) || std::isnan(b)) throw std::invalid_argument("distance matrix contains NaN");
      if (a == b) continue;
      if (std::abs(a - b) > 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}))
        throw std::invalid_argument("distance matrix is not symmetric at (" + std::to_string(i) + "," +
                                    std::to_string(j) + ")");
      values_(j, i) = a;
    }
  }
}

bool DistanceMatrix::has_unreachable() const {
  for (Eigen::Index i = 0; i < values_.size(); ++i)
    if (std::isinf(values_.data()[i])) return true;
  return false;
}

double DistanceMatrix::max_finite() const {
  double best = -std::numeric_limits<double>::infinity();
  const auto n = values_.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      if (std::isfinite(values_(i, j))) best = std::max(best, values_(i, j));
  return best;
}

DistanceMatrix DistanceMatrix::sqrt() const {
  Matrix out = values_.array().max(0.0).sqrt().matrix();
  return DistanceMatrix(std::move(out), false);
}

DistanceMatrix pairwise_euclidean(const Matrix& rows, bool squared_output) {
  const auto n = rows.rows();
  const auto dim = static_cast<std::size_t>(rows.cols());
  const auto& k = kernels::active();
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) {
    k.squared_l2_many(rows.data() + i * rows.cols(), rows.data(), static_cast<std::size_t>(i), dim,
                      out.data() + i * n);
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = squared_output ? out(i, j) : std::sqrt(out(i, j));
      out(i, j) = out(j, i) = v;
    }
  }
  return DistanceMatrix(std::move(out), squared_output);
}

void write_distance_csv(std::ostream& out, const DistanceMatrix& dist) {
  const auto n = dist.size();
  out << "# spectraph-distance v1\n";
  out << "n=" << n << " squared=" << (dist.squared() ? 1 : 0) << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (j) out << ',';
      out << detail::format_double(dist(i, j));
    }
    out << '\n';
  }
}

namespace {

// Headerless input: every row of the full square matrix.
DistanceMatrix read_full_matrix(std::string first, std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line = std::move(first);
  do {
    auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::vector<double> row;
    for (auto cell : detail::split(t, ',')) {
      auto v = detail::parse_double(cell);
      if (!v) throw std::runtime_error("distance CSV: non-numeric entry in row " + std::to_string(rows.size()));
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
  } while (std::getline(in, line));
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != n)
      throw std::runtime_error("distance CSV: expected a square matrix, row " + std::to_string(i) + " has " +
                               std::to_string(rows[i].size()) + " entries");
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return DistanceMatrix(std::move(m));
}

}  // namespace

DistanceMatrix read_distance_csv(std::istream& in) {
  std::string line;
  bool have_header = false;
  long long n = -1;
  int squared = 0;
  while (std::getline(in, line)) {
    auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::istringstream hs{std::string(t)};
    std::string a, b;
    hs >> a >> b;
    if (a.rfind("n=", 0) != 0 || b.rfind("squared=", 0) != 0) return read_full_matrix(std::string(t), in);
    n = std::stoll(a.substr(2));
    squared = std::stoi(b.substr(8));
    have_header = true;
    break;
  }
  if (!have_header || n < 1) throw std::runtime_error("distance CSV: missing or invalid header");
  Matrix m = Matrix::Zero(n, n);
  for (long long i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw std::runtime_error("distance CSV: truncated at row " + std::to_string(i));
    auto t = detail::trim(line);
    if (i == 0) {
      if (!t.empty()) throw std::runtime_error("distance CSV: row 0 must be empty");
      continue;
    }
    auto cells = detail::split(t, ',');
    if (static_cast<long long>(cells.size()) != i)
      throw std::runtime_error("distance CSV: row " + std::to_string(i) + " must have " + std::to_string(i) +
                               " entries");
    for (long long j = 0; j < i; ++j) {
      auto v = detail::parse_double(cells[j]);
      if (!v) throw std::runtime_error("distance CSV: non-numeric entry in row " + std::to_string(i));
      m(i, j) = m(j, i) = *v;
    }
  }
  return DistanceMatrix(std::move(m), squared != 0);
}

void save_distance_csv(const std::string& path, const DistanceMatrix& dist) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_distance_csv(out, dist);
}

DistanceMatrix load_distance_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_distance_csv(in);
}

}  // namespace spectraph
