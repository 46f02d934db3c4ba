#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace spectraph {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// n points in R^d stored row-wise. Immutable once constructed; every entry is finite.
class PointCloud {
 public:
  explicit PointCloud(Matrix points);

  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(points_.cols()); }
  const Matrix& points() const { return points_; }
  const double* row(std::size_t i) const { return points_.data() + i * dim(); }

 private:
  Matrix points_;
};

}  // namespace spectraph
