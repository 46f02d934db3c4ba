#pragma once

#include "spectraph/distance_matrix.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace spectraph {

struct PersistenceFeature {
  int dim = 0;
  double birth = 0.0;
  double death = 0.0;  // +inf for classes that never die below the threshold
  std::vector<std::size_t> birth_simplex;  // vertices in descending order; empty for H0

  double persistence() const { return death - birth; }
};

struct PersistenceDiagram {
  std::vector<PersistenceFeature> features;  // by dim, then decreasing persistence
  int max_dim = 1;
  double threshold = 0.0;
  bool includes_h0 = false;

  std::vector<PersistenceFeature> of_dim(int dim) const;
  /// Persistences of the dim-features in decreasing order.
  std::vector<double> persistences(int dim) const;
};

struct RipsOptions {
  int max_dim = 1;
  std::optional<double> threshold;  // default: enclosing radius
  bool include_h0 = false;
};

/// min_i max_j d_ij.
double enclosing_radius(const DistanceMatrix& dist);

/// Vietoris-Rips persistent homology over GF(2) via persistent cohomology with
/// clearing and implicit coboundaries. Simplices enter by diameter; equal
/// diameters are ordered by decreasing combinatorial index. Zero-persistence
/// pairs are dropped.
PersistenceDiagram rips_persistence(const DistanceMatrix& dist, const RipsOptions& options = {});

/// Betti numbers beta_0..beta_max_dim of the Rips complex at scale tau, from
/// GF(2) ranks of the full boundary matrices. n <= 10.
std::vector<std::size_t> brute_force_betti(const DistanceMatrix& dist, double tau, int max_dim);

/// Number of dim-features with birth <= tau < death.
std::size_t betti_at(const PersistenceDiagram& diagram, int dim, double tau);

using Edge = std::pair<std::size_t, std::size_t>;

/// A GF(2) 1-cycle in the Rips complex at the feature's birth whose class is the
/// feature's: the birth edge closed by a shortest path through earlier edges.
std::vector<Edge> representative_cycle(const DistanceMatrix& dist, const PersistenceFeature& feature);

/// "dim,birth,death" rows behind a version comment.
void write_diagram_csv(std::ostream& out, const PersistenceDiagram& diagram);
PersistenceDiagram read_diagram_csv(std::istream& in);
void save_diagram_csv(const std::string& path, const PersistenceDiagram& diagram);
PersistenceDiagram load_diagram_csv(const std::string& path);

/// "feature_id,u,v" rows; feature_id indexes PersistenceDiagram::features.
void write_cycles_csv(std::ostream& out, const std::vector<std::pair<std::size_t, std::vector<Edge>>>& cycles);

}  // namespace spectraph
