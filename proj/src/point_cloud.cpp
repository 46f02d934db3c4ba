#include "spectraph/point_cloud.hpp"

#include <stdexcept>

namespace spectraph {

PointCloud::PointCloud(Matrix points) : points_(std::move(points)) {
  if (points_.rows() < 1 || points_.cols() < 1)
    throw std::invalid_argument("point cloud needs at least one point and one dimension");
  if (!points_.allFinite()) throw std::invalid_argument("point cloud contains non-finite values");
}

}  // namespace spectraph
