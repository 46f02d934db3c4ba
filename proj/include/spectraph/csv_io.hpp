#pragma once

#include "spectraph/point_cloud.hpp"

#include <iosfwd>
#include <string>

namespace spectraph {

/// Rectangular comma-separated table, one point per row. A single non-numeric
/// first row is treated as a header; lines starting with '#' are skipped.
PointCloud read_point_cloud_csv(std::istream& in);
PointCloud load_csv(const std::string& path);

void write_point_cloud_csv(std::ostream& out, const PointCloud& pc);
void save_point_cloud_csv(const std::string& path, const PointCloud& pc);

}  // namespace spectraph
