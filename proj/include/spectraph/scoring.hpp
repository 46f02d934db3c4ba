#pragma once

#include "spectraph/rips.hpp"

namespace spectraph {

inline constexpr double kDefaultRatioThreshold = 1.25;

/// (p_m - p_{m+1}) / p_m over the dim-persistences sorted in decreasing order;
/// 0 with fewer than m features, 1 with exactly m.
double hole_detection_score(const std::vector<double>& persistences, std::size_t m);
double hole_detection_score(const PersistenceDiagram& diagram, int dim, std::size_t m);

/// True iff every dim-feature has death / birth < ratio (vacuously true when
/// there are none). Features born at 0 never count as below the ratio.
bool apply_threshold(const PersistenceDiagram& diagram, int dim, double ratio = kDefaultRatioThreshold);

/// 1 iff the widest gap p_a - p_{a+1} (zero-padded, smallest a on ties) sits at a = m_true.
int widest_gap_score(const std::vector<double>& persistences, std::size_t m_true);
int widest_gap_score(const PersistenceDiagram& diagram, int dim, std::size_t m_true);

struct ScoreReport {
  double s_m = 0.0;
  std::size_t m = 1;
  int dim = 1;
  bool thresholded = false;
  int widest_gap_correct = 0;
};

/// Score, gate and widest gap for one homology dimension.
ScoreReport score_diagram(const PersistenceDiagram& diagram, int dim, std::size_t m, bool use_threshold = true,
                          double ratio = kDefaultRatioThreshold);

}  // namespace spectraph
