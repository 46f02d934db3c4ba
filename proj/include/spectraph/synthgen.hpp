#pragma once

#include "spectraph/point_cloud.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace spectraph {

enum class Manifold { circle, linked_circles, eyeglasses, sphere, torus };

Manifold parse_manifold(std::string_view name);
std::string_view manifold_name(Manifold m);
/// Dimension of the noise-free coordinates produced by generate_manifold.
std::size_t intrinsic_embedding_dim(Manifold m);

struct GenSpec {
  Manifold manifold = Manifold::circle;
  std::size_t n = 1000;
  std::size_t ambient_dim = 50;
  double noise_sigma = 0.0;
  std::size_t outlier_count = 0;
  std::uint64_t seed = 0;
};

/// Largest noise level of the benchmark; sizes the outlier box.
inline constexpr double kMaxBenchmarkSigma = 0.35;

/// Noise-free samples in intrinsic coordinates (2D or 3D).
///  - circle: n equidistant points on the unit circle, first at angle 0
///  - linked_circles: two unit circles of n/2 points, each through the other's
///    center in perpendicular planes (odd n puts the extra point on the first)
///  - eyeglasses: two arcs (arclength pi + 2.4, radius 1, centers 3 apart,
///    gaps facing) and two bridge segments (length 1.06, 0.7 apart);
///    0.425n / 0.425n / 0.075n / remainder points
///  - sphere: n uniform samples on the unit sphere
///  - torus: n samples uniform w.r.t. surface area, tube radius 1, center radius 2
PointCloud generate_manifold(const GenSpec& spec);

/// Maps pc into R^target_dim through a random matrix with orthonormal columns.
PointCloud embed_isometric(const PointCloud& pc, std::size_t target_dim, std::uint64_t seed);
/// The d x k matrix with orthonormal columns used by embed_isometric.
Matrix random_orthonormal_columns(std::size_t rows, std::size_t cols, std::uint64_t seed);

PointCloud add_gaussian_noise(const PointCloud& pc, double sigma, std::uint64_t seed);

struct Box {
  Vector lower;
  Vector upper;
};

/// Axis-aligned bounding box of `reference`, widened by 3 * sigma_max per side.
Box outlier_box(const PointCloud& reference, double sigma_max = kMaxBenchmarkSigma);
/// Appends `count` points drawn uniformly from `box`.
PointCloud add_outliers(const PointCloud& pc, std::size_t count, std::uint64_t seed, const Box& box);
/// Same, with the box computed from pc itself.
PointCloud add_outliers(const PointCloud& pc, std::size_t count, std::uint64_t seed);

/// Full pipeline for one spec: generate, embed, add noise, add outliers.
/// Each stage draws from its own stream derived from spec.seed.
PointCloud generate(const GenSpec& spec);

}  // namespace spectraph
