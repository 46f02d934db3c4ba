#include "spectraph/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace spectraph {

namespace {

std::vector<double> sorted_desc(std::vector<double> p) {
  std::sort(p.begin(), p.end(), std::greater<>());
  return p;
}

}  // namespace

double hole_detection_score(const std::vector<double>& persistences, std::size_t m) {
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  const std::vector<double> p = sorted_desc(persistences);
  if (p.size() < m) return 0.0;
  const double pm = p[m - 1];
  const double next = p.size() > m ? p[m] : 0.0;
  if (std::isinf(pm)) return std::isinf(next) ? 0.0 : 1.0;
  if (!(pm > 0)) return 0.0;
  return std::clamp((pm - next) / pm, 0.0, 1.0);
}

double hole_detection_score(const PersistenceDiagram& diagram, int dim, std::size_t m) {
  return hole_detection_score(diagram.persistences(dim), m);
}

bool apply_threshold(const PersistenceDiagram& diagram, int dim, double ratio) {
  for (const auto& f : diagram.features) {
    if (f.dim != dim) continue;
    if (f.birth <= 0) {
      if (f.death > 0) return false;
      continue;
    }
    if (f.death / f.birth >= ratio) return false;
  }
  return true;
}

int widest_gap_score(const std::vector<double>& persistences, std::size_t m_true) {
  if (m_true < 1) throw std::invalid_argument("m_true must be at least 1");
  const std::vector<double> p = sorted_desc(persistences);
  if (p.empty()) return 0;
  std::size_t best = 1;
  double widest = -1.0;
  for (std::size_t a = 1; a <= p.size(); ++a) {
    const double gap = p[a - 1] - (a < p.size() ? p[a] : 0.0);
    if (gap > widest) {
      widest = gap;
      best = a;
    }
  }
  return best == m_true ? 1 : 0;
}

int widest_gap_score(const PersistenceDiagram& diagram, int dim, std::size_t m_true) {
  return widest_gap_score(diagram.persistences(dim), m_true);
}

ScoreReport score_diagram(const PersistenceDiagram& diagram, int dim, std::size_t m, bool use_threshold,
                          double ratio) {
  ScoreReport r;
  r.m = m;
  r.dim = dim;
  const std::vector<double> p = diagram.persistences(dim);
  r.s_m = hole_detection_score(p, m);
  r.thresholded = use_threshold && apply_threshold(diagram, dim, ratio);
  if (r.thresholded) r.s_m = 0.0;
  r.widest_gap_correct = widest_gap_score(p, m);
  return r;
}

}  // namespace spectraph
