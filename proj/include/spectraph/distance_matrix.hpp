#pragma once

#include "spectraph/point_cloud.hpp"

#include <iosfwd>
#include <limits>
#include <string>

namespace spectraph {

/// Marks pairs that are unreachable (different graph components, zero affinity).
inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

/// Symmetric n x n dissimilarities with a zero diagonal.
///
/// `squared()` records that the entries are squared distances (effective
/// resistance); persistence is invariant to that choice up to the monotone
/// square root, so it is carried as metadata only.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  /// Validates symmetry (within 1e-12 relative) and an exactly zero diagonal,
  /// then mirrors the lower triangle so the stored matrix is exactly symmetric.
  explicit DistanceMatrix(Matrix values, bool squared = false);

  std::size_t size() const { return static_cast<std::size_t>(values_.rows()); }
  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
  const Matrix& values() const { return values_; }
  bool squared() const { return squared_; }

  bool has_unreachable() const;
  /// Largest finite off-diagonal entry, or -inf when there is none.
  double max_finite() const;

  /// Element-wise square root; clears the squared flag.
  DistanceMatrix sqrt() const;

 private:
  Matrix values_;
  bool squared_ = false;
};

/// Pairwise Euclidean distances between the rows of `rows` (squared when
/// `squared_output`). Uses the dispatched SIMD kernel; the result is exactly symmetric.
DistanceMatrix pairwise_euclidean(const Matrix& rows, bool squared_output = false);

/// Lower-triangular CSV: optional '#' comment lines, a header "n=<n> squared=<0|1>",
/// then n rows where row i lists d(i,0..i-1). Infinite entries are written as "inf".
/// The reader also accepts a headerless full square matrix.
void write_distance_csv(std::ostream& out, const DistanceMatrix& dist);
DistanceMatrix read_distance_csv(std::istream& in);
void save_distance_csv(const std::string& path, const DistanceMatrix& dist);
DistanceMatrix load_distance_csv(const std::string& path);

}  // namespace spectraph
