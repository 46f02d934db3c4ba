#include "spectraph/synthgen.hpp"

#include "spectraph/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spectraph {

namespace {

constexpr double kPi = std::numbers::pi;

// Eyeglasses geometry.
constexpr double kArcLength = kPi + 2.4;
constexpr double kArcCenterOffset = 1.5;  // centers 3 apart
constexpr double kBridgeLength = 1.06;
constexpr double kBridgeGap = 0.7;

constexpr double kTorusTube = 1.0;
constexpr double kTorusCenter = 2.0;

// Angles spanning [start, start + span] with both ends included.
double arc_angle(double start, double span, std::size_t k, std::size_t count) {
  if (count == 1) return start + span / 2;
  return start + span * static_cast<double>(k) / static_cast<double>(count - 1);
}

}  // namespace

Manifold parse_manifold(std::string_view name) {
  if (name == "circle") return Manifold::circle;
  if (name == "linked_circles") return Manifold::linked_circles;
  if (name == "eyeglasses") return Manifold::eyeglasses;
  if (name == "sphere") return Manifold::sphere;
  if (name == "torus") return Manifold::torus;
  throw std::invalid_argument("unknown manifold '" + std::string(name) + "'");
}

std::string_view manifold_name(Manifold m) {
  switch (m) {
    case Manifold::circle: return "circle";
    case Manifold::linked_circles: return "linked_circles";
    case Manifold::eyeglasses: return "eyeglasses";
    case Manifold::sphere: return "sphere";
    case Manifold::torus: return "torus";
  }
  return "?";
}

std::size_t intrinsic_embedding_dim(Manifold m) {
  return (m == Manifold::circle || m == Manifold::eyeglasses) ? 2 : 3;
}

PointCloud generate_manifold(const GenSpec& spec) {
  const std::size_t n = spec.n;
  if (n < 4) throw std::invalid_argument("manifold sample size must be at least 4");
  CounterRng rng(derive_seed(spec.seed, 1));
  Matrix pts(n, intrinsic_embedding_dim(spec.manifold));

  switch (spec.manifold) {
    case Manifold::circle:
      for (std::size_t i = 0; i < n; ++i) {
        const double a = 2 * kPi * static_cast<double>(i) / static_cast<double>(n);
        pts(i, 0) = std::cos(a);
        pts(i, 1) = std::sin(a);
      }
      break;

    case Manifold::linked_circles: {
      const std::size_t first = n - n / 2, second = n / 2;
      for (std::size_t i = 0; i < first; ++i) {
        const double a = 2 * kPi * static_cast<double>(i) / static_cast<double>(first);
        pts.row(i) << std::cos(a), std::sin(a), 0.0;
      }
      for (std::size_t i = 0; i < second; ++i) {
        const double a = 2 * kPi * static_cast<double>(i) / static_cast<double>(second);
        pts.row(first + i) << 1.0 + std::cos(a), 0.0, std::sin(a);
      }
      break;
    }

    case Manifold::eyeglasses: {
      const auto arc = static_cast<std::size_t>(std::llround(0.425 * static_cast<double>(n)));
      const auto bridge = static_cast<std::size_t>(std::llround(0.075 * static_cast<double>(n)));
      if (2 * arc + bridge > n) throw std::invalid_argument("eyeglasses: part sizes exceed n");
      const std::size_t last = n - 2 * arc - bridge;
      const double gap = 2 * kPi - kArcLength;
      std::size_t row = 0;
      // Left arc, gap facing +x.
      for (std::size_t k = 0; k < arc; ++k, ++row) {
        const double a = arc_angle(gap / 2, kArcLength, k, arc);
        pts.row(row) << -kArcCenterOffset + std::cos(a), std::sin(a);
      }
      // Right arc, gap facing -x.
      for (std::size_t k = 0; k < arc; ++k, ++row) {
        const double a = arc_angle(-kPi + gap / 2, kArcLength, k, arc);
        pts.row(row) << kArcCenterOffset + std::cos(a), std::sin(a);
      }
      for (double y : {kBridgeGap / 2, -kBridgeGap / 2}) {
        const std::size_t count = (y > 0) ? bridge : last;
        for (std::size_t k = 0; k < count; ++k, ++row) {
          const double x = count == 1 ? 0.0
                                      : -kBridgeLength / 2 + kBridgeLength * static_cast<double>(k) /
                                                                 static_cast<double>(count - 1);
          pts.row(row) << x, y;
        }
      }
      break;
    }

    case Manifold::sphere:
      for (std::size_t i = 0; i < n; ++i) {
        double x, y, z, r;
        do {
          x = rng.normal();
          y = rng.normal();
          z = rng.normal();
          r = std::sqrt(x * x + y * y + z * z);
        } while (r == 0.0);
        pts.row(i) << x / r, y / r, z / r;
      }
      break;

    case Manifold::torus:
      for (std::size_t i = 0; i < n; ++i) {
        double tube;
        // Area element is proportional to R + r cos(tube).
        do {
          tube = 2 * kPi * rng.uniform();
        } while (rng.uniform() * (kTorusCenter + kTorusTube) > kTorusCenter + kTorusTube * std::cos(tube));
        const double around = 2 * kPi * rng.uniform();
        const double ring = kTorusCenter + kTorusTube * std::cos(tube);
        pts.row(i) << ring * std::cos(around), ring * std::sin(around), kTorusTube * std::sin(tube);
      }
      break;
  }
  return PointCloud(std::move(pts));
}

Matrix random_orthonormal_columns(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  if (cols > rows) throw std::invalid_argument("cannot fit more orthonormal columns than rows");
  CounterRng rng(seed);
  Eigen::MatrixXd g(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
  // Fix column signs so the draw is a deterministic function of g.
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (std::size_t j = 0; j < cols; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

PointCloud embed_isometric(const PointCloud& pc, std::size_t target_dim, std::uint64_t seed) {
  if (target_dim < pc.dim())
    throw std::invalid_argument("embedding dimension " + std::to_string(target_dim) +
                                " is smaller than the cloud dimension " + std::to_string(pc.dim()));
  const Matrix v = random_orthonormal_columns(target_dim, pc.dim(), seed);
  return PointCloud(pc.points() * v.transpose());
}

PointCloud add_gaussian_noise(const PointCloud& pc, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0)) throw std::invalid_argument("noise sigma must be non-negative");
  if (sigma == 0) return pc;
  CounterRng rng(seed);
  Matrix out = pc.points();
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] += sigma * rng.normal();
  return PointCloud(std::move(out));
}

Box outlier_box(const PointCloud& reference, double sigma_max) {
  const Matrix& p = reference.points();
  Box box{p.colwise().minCoeff().transpose(), p.colwise().maxCoeff().transpose()};
  box.lower.array() -= 3 * sigma_max;
  box.upper.array() += 3 * sigma_max;
  return box;
}

PointCloud add_outliers(const PointCloud& pc, std::size_t count, std::uint64_t seed, const Box& box) {
  if (count == 0) return pc;
  if (static_cast<std::size_t>(box.lower.size()) != pc.dim() ||
      static_cast<std::size_t>(box.upper.size()) != pc.dim())
    throw std::invalid_argument("outlier box dimension does not match the cloud");
  CounterRng rng(seed);
  Matrix out(pc.size() + count, pc.dim());
  out.topRows(pc.size()) = pc.points();
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < pc.dim(); ++j)
      out(pc.size() + i, j) = box.lower[j] + (box.upper[j] - box.lower[j]) * rng.uniform();
  return PointCloud(std::move(out));
}

PointCloud add_outliers(const PointCloud& pc, std::size_t count, std::uint64_t seed) {
  return add_outliers(pc, count, seed, outlier_box(pc));
}

PointCloud generate(const GenSpec& spec) {
  if (spec.ambient_dim < intrinsic_embedding_dim(spec.manifold))
    throw std::invalid_argument("ambient dimension is below the manifold's embedding dimension");
  PointCloud clean = embed_isometric(generate_manifold(spec), spec.ambient_dim, derive_seed(spec.seed, 2));
  PointCloud noisy = add_gaussian_noise(clean, spec.noise_sigma, derive_seed(spec.seed, 3));
  return add_outliers(noisy, spec.outlier_count, derive_seed(spec.seed, 4), outlier_box(clean));
}

}  // namespace spectraph
