// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "oracles.hpp"

#include "spectraph/basedist.hpp"
#include "spectraph/bench.hpp"
#include "spectraph/rips.hpp"
#include "spectraph/scoring.hpp"
#include "spectraph/spectral.hpp"
#include "spectraph/synthgen.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <array>
#include <functional>
#include <map>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

using namespace spectraph;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

NeighborGraph p3() { return oracle::graph_from_edges(3, {{0, 1}, {1, 2}}); }
NeighborGraph triangle_chain() { return oracle::graph_from_edges(5, {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {3, 4}}); }

void exact_values(Outcome& o) {
  const double tol = 1e-9;
  auto near = [&](double a, double b, const std::string& what) { o.require(std::abs(a - b) <= tol, what + " = " + num(a)); };
  for (auto route : {NaiveResistanceRoute::pseudoinverse, NaiveResistanceRoute::spectral}) {
    near(effective_resistance_naive(p3(), route)(0, 2), 2.0, "P3 naive (0,2)");
    const DistanceMatrix n5 = effective_resistance_naive(triangle_chain(), route);
    near(n5(0, 4), 8.0 / 3, "triangle chain naive (0,4)");
    near(n5(0, 2), 2.0 / 3, "triangle chain naive (0,2)");
    near(n5(2, 4), 2.0, "triangle chain naive (2,4)");
  }
  for (auto route : {CorrectedResistanceRoute::correction_formula, CorrectedResistanceRoute::spectral}) {
    near(effective_resistance_corrected(p3(), route)(0, 2), 0.0, "P3 corrected (0,2)");
    const DistanceMatrix c5 = effective_resistance_corrected(triangle_chain(), route);
    near(c5(0, 4), 7.0 / 6, "triangle chain corrected (0,4)");
    near(c5(0, 2), 1.0 / 6, "triangle chain corrected (0,2)");
    near(c5(2, 4), 2.0 / 3, "triangle chain corrected (2,4)");
  }
  for (auto route : {DiffusionRoute::transition_matrix, DiffusionRoute::spectral})
    near(diffusion_distance(p3(), 1, route)(0, 2), 0.0, "P3 diffusion t=1 (0,2)");
  o.detail << "P3 and triangle-chain values within 1e-9";
}

void route_equivalence(Outcome& o) {
  double worst_naive = 0, worst_corr = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 5 + seed % 46;
    const NeighborGraph g = oracle::random_connected_graph(n, 1000 + seed, 4.0 / static_cast<double>(n), seed % 2 == 1);
    const Matrix a = effective_resistance_naive(g, NaiveResistanceRoute::pseudoinverse).values();
    const Matrix b = effective_resistance_naive(g, NaiveResistanceRoute::spectral).values();
    const Matrix c = effective_resistance_corrected(g, CorrectedResistanceRoute::correction_formula).values();
    const Matrix d = effective_resistance_corrected(g, CorrectedResistanceRoute::spectral).values();
    worst_naive = std::max(worst_naive, (a - b).cwiseAbs().maxCoeff());
    worst_corr = std::max(worst_corr, (c - d).cwiseAbs().maxCoeff());
  }
  o.require(worst_naive <= 1e-8, "naive routes differ by " + num(worst_naive));
  o.require(worst_corr <= 1e-8, "corrected routes differ by " + num(worst_corr));
  o.detail << "100 graphs n<=50; max |naive diff| " << num(worst_naive) << ", max |corrected diff| " << num(worst_corr);
}

void series_identities(Outcome& o) {
  double worst_identity = 0, worst_excess = 0;
  std::size_t graphs = 0;
  for (std::uint64_t seed = 0; graphs < 50; ++seed) {
    const std::size_t n = 5 + seed % 26;
    const NeighborGraph g = oracle::random_connected_graph(n, 5000 + seed, 0.25, seed % 2 == 0);
    const Eigen::MatrixXd lsym = laplacians(g).normalized;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lsym);
    double q = 0;
    for (Eigen::Index l = 1; l < es.eigenvalues().size(); ++l) q = std::max(q, std::abs(1 - es.eigenvalues()[l]));
    if (q > 1 - 1e-6) continue;  // bipartite or numerically so
    ++graphs;

    const SpectralDecomposition dec = eigendecompose(g);
    const Matrix naive = effective_resistance_naive(dec).values();
    const Matrix corrected = effective_resistance_corrected(dec).values();
    const DistanceMatrix dpt = dpt_distance(dec, DptVariant::symd);
    const Matrix dpt_sq = dpt.squared() ? dpt.values() : Matrix(dpt.values().array().square());
    const Vector& deg = g.degrees();
    const Eigen::MatrixXd asym = Eigen::MatrixXd::Identity(n, n) - lsym;

    // Enough terms for a negligible tail, checked at several truncation points.
    const int t_max = std::min(5000, static_cast<int>(std::ceil(std::log(1e-13 * (1 - q) * (1 - q)) / std::log(q))) + 10);
    std::set<int> checkpoints{2, 5, 10, 20, t_max / 2, t_max};
    const int pairs = static_cast<int>(std::min<std::size_t>(n, 6));
    std::vector<double> s_all(pairs * pairs, 0.0), s_corr(pairs * pairs, 0.0), s_dpt(pairs * pairs, 0.0);
    std::vector<double> term0(pairs * pairs), term1(pairs * pairs);
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
    for (int t = 0; t <= t_max; ++t) {
      for (int i = 0; i < pairs; ++i)
        for (int j = 0; j < pairs; ++j) {
          if (i == j) continue;
          const double term = oracle::diffusion_half_sq_over_vol(power, deg, i, j);
          const int idx = i * pairs + j;
          s_all[idx] += term;
          if (t >= 2) s_corr[idx] += term;
          s_dpt[idx] += (t - 1) * term * (t >= 1);
          if (t == 0) term0[idx] = term;
          if (t == 1) term1[idx] = term;
        }
      if (checkpoints.count(t)) {
        const double c_tail = std::pow(q, t + 1) / (1 - q);
        const double d_tail = std::pow(q, t + 1) * (t / (1 - q) + q / ((1 - q) * (1 - q)));
        for (int i = 0; i < pairs; ++i)
          for (int j = 0; j < pairs; ++j) {
            if (i == j) continue;
            const int idx = i * pairs + j;
            const double c = 1 / deg[i] + 1 / deg[j];
            worst_excess = std::max({worst_excess, std::abs(corrected(i, j) - s_corr[idx]) - c * c_tail,
                                     std::abs(naive(i, j) - s_all[idx]) - c * c_tail,
                                     std::abs(dpt_sq(i, j) - s_dpt[idx]) - c * d_tail});
          }
      }
      power = power * asym;
    }
    for (int i = 0; i < pairs; ++i)
      for (int j = 0; j < pairs; ++j)
        if (i != j)
          worst_identity = std::max(worst_identity, std::abs(naive(i, j) - corrected(i, j) -
                                                             (term0[i * pairs + j] + term1[i * pairs + j])));
  }
  o.require(worst_identity <= 1e-8, "correction identity off by " + num(worst_identity));
  o.require(worst_excess <= 1e-9, "partial sums exceed the tail bound by " + num(worst_excess));
  o.detail << "50 non-bipartite graphs n<=30; identity err " << num(worst_identity) << ", max excess over tail bound "
           << num(worst_excess);
}

std::vector<double> midpoints(const DistanceMatrix& d) {
  std::set<double> values{0.0};
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) values.insert(d(i, j));
  std::vector<double> v(values.begin(), values.end()), out;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) out.push_back((v[i] + v[i + 1]) / 2);
  out.push_back(v.back() + 1);
  return out;
}

void oracle_equivalence(Outcome& o) {
  std::size_t instances = 0, checks = 0, mismatches = 0;
  CounterRng rng(31);
  for (std::uint64_t seed = 0; seed < 240; ++seed) {
    const std::size_t n = 3 + seed % 6;
    DistanceMatrix d = pairwise_euclidean(oracle::random_points(n, 1 + seed % 4, 9000 + seed));
    if (seed % 3 == 2) {
      // Integer dissimilarities, not necessarily metric, with many ties.
      Matrix m = Matrix::Zero(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) m(i, j) = m(j, i) = 1 + std::floor(4 * rng.uniform());
      d = DistanceMatrix(m);
    }
    RipsOptions opts;
    opts.max_dim = 2;
    opts.include_h0 = true;
    opts.threshold = d.values().maxCoeff();
    const PersistenceDiagram diag = rips_persistence(d, opts);
    for (double tau : midpoints(d)) {
      const auto betti = brute_force_betti(d, tau, 2);
      for (int k = 0; k <= 2; ++k) {
        ++checks;
        if (betti_at(diag, k, tau) != betti[k]) ++mismatches;
      }
    }
    ++instances;
  }
  o.require(instances >= 200, "too few instances");
  o.require(mismatches == 0, std::to_string(mismatches) + " Betti mismatches");
  o.detail << instances << " instances n<=8, " << checks << " Betti comparisons, " << mismatches << " mismatches";
}

void known_diagrams(Outcome& o) {
  Matrix sq(4, 2);
  sq << 0, 0, 1, 0, 1, 1, 0, 1;
  const PersistenceDiagram ds = rips_persistence(pairwise_euclidean(sq));
  o.require(ds.features.size() == 1 && ds.features[0].dim == 1, "square has one H1 feature");
  if (!ds.features.empty()) {
    o.require(std::abs(ds.features[0].birth - 1) <= 1e-12, "square birth");
    o.require(std::abs(ds.features[0].death - std::sqrt(2.0)) <= 1e-12, "square death");
  }
  GenSpec s;
  s.n = 20;
  const DistanceMatrix circle = pairwise_euclidean(generate_manifold(s).points());
  const auto h1 = rips_persistence(circle).of_dim(1);
  const double expected = 2 * std::sin(std::numbers::pi / 20);
  o.require(!h1.empty() && std::abs(h1[0].birth - expected) <= 1e-12, "circle-20 dominant birth");

  std::size_t compared = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DistanceMatrix d = pairwise_euclidean(oracle::random_points(12, 3, 300 + seed));
    RipsOptions opts;
    opts.max_dim = 2;
    const PersistenceDiagram base = rips_persistence(d, opts);
    for (const auto& f : std::vector<std::function<double(double)>>{[](double x) { return std::sqrt(x); },
                                                                     [](double x) { return x * x * x + 2 * x; },
                                                                     [](double x) { return std::exp(x) - 1; }}) {
      const PersistenceDiagram mapped = rips_persistence(DistanceMatrix(d.values().unaryExpr(f)), opts);
      std::multiset<std::tuple<int, double, double>> a, b;
      for (const auto& x : base.features) a.insert({x.dim, f(x.birth), f(x.death)});
      for (const auto& x : mapped.features) b.insert({x.dim, x.birth, x.death});
      o.require(a == b, "monotone transform commutation");
      ++compared;
    }
  }
  o.detail << "square (" << num(ds.features.empty() ? 0 : ds.features[0].birth) << ", "
           << num(ds.features.empty() ? 0 : ds.features[0].death) << "); circle-20 birth err "
           << num(h1.empty() ? 1 : std::abs(h1[0].birth - expected)) << "; " << compared << " exact transform comparisons";
}

double cell_score(Manifold m, std::size_t n, double sigma, std::uint64_t seed, const DistanceSpec& spec, int dim,
                  std::size_t max_dim = 1) {
  GenSpec g;
  g.manifold = m;
  g.n = n;
  g.ambient_dim = 50;
  g.noise_sigma = sigma;
  g.seed = seed;
  const DistanceMatrix d = compute_distance(generate(g), spec);
  RipsOptions opts;
  opts.max_dim = static_cast<int>(max_dim);
  return score_diagram(rips_persistence(d, opts), dim, 1).s_m;
}

void circle_reproduction(Outcome& o) {
  const std::vector<std::pair<std::string, DistanceSpec>> distances = {
      {"euclidean", make_distance_spec("euclidean")},
      {"eff_res", make_distance_spec("eff_res", {{"k", 30}})},
      {"diffusion", make_distance_spec("diffusion", {{"k", 30}, {"t", 8}})}};
  std::map<std::string, std::array<double, 2>> mean;
  for (const auto& [name, spec] : distances) {
    for (int level = 0; level < 2; ++level) {
      double acc = 0;
      o.detail << name << "@" << (level ? "0.25" : "0") << " [";
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const double s = cell_score(Manifold::circle, 300, level ? 0.25 : 0.0, seed, spec, 1);
        o.detail << (seed ? " " : "") << num(s);
        acc += s;
      }
      mean[name][level] = acc / 3;
      o.detail << "] ";
    }
  }
  for (const auto& [name, _] : distances) o.require(mean[name][0] >= 0.9, name + " at sigma 0 below 0.9");
  o.require(mean["euclidean"][1] <= 0.1, "euclidean at sigma 0.25 above 0.1");
  o.require(mean["eff_res"][1] >= mean["euclidean"][1] + 0.3, "eff_res margin at sigma 0.25");
  o.require(mean["diffusion"][1] >= mean["euclidean"][1] + 0.3, "diffusion margin at sigma 0.25");
  o.detail << "(seed means)";
}

void sphere_control(Outcome& o) {
  const std::vector<std::pair<std::string, DistanceSpec>> distances = {
      {"euclidean", make_distance_spec("euclidean")},
      {"eff_res", make_distance_spec("eff_res")},
      {"diffusion", make_distance_spec("diffusion")}};
  double worst_mean = 0;
  for (const auto& [name, spec] : distances)
    for (double sigma : {0.0, 0.15}) {
      double mean = 0;
      o.detail << name << "@" << num(sigma) << " [";
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const double s = cell_score(Manifold::sphere, 150, sigma, seed, spec, 1);
        o.detail << (seed ? " " : "") << num(s);
        mean += s / 3;
      }
      o.detail << "] ";
      worst_mean = std::max(worst_mean, mean);
      o.require(mean < 0.5, name + " mean loop score " + num(mean) + " at sigma " + num(sigma));
    }
  double void_mean = 0;
  o.detail << "max mean H1 score " << num(worst_mean) << "; eff_res H2 at sigma 0 [";
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const double s = cell_score(Manifold::sphere, 150, 0.0, seed, make_distance_spec("eff_res"), 2, 2);
    o.detail << (seed ? " " : "") << num(s);
    void_mean += s / 3;
  }
  o.detail << "] mean " << num(void_mean);
  o.require(void_mean >= 0.5, "eff_res void score below 0.5");
}

void concentration(Outcome& o) {
  const double sigma = 0.3, delta = 1.5;
  for (std::size_t d : {std::size_t{10}, std::size_t{10000}}) {
    const std::size_t draws = 1000, chunk = 100;
    std::vector<double> noise_sq, total_sq;
    Matrix clean = Matrix::Zero(2 * chunk, d);
    for (std::size_t r = 0; r < chunk; ++r) clean(2 * r + 1, 0) = delta;
    for (std::size_t c = 0; c < draws / chunk; ++c) {
      const PointCloud noisy = add_gaussian_noise(PointCloud(clean), sigma, 70000 + 31 * d + c);
      const Matrix eps = noisy.points() - clean;
      for (std::size_t r = 0; r < chunk; ++r) {
        noise_sq.push_back((eps.row(2 * r) - eps.row(2 * r + 1)).squaredNorm());
        total_sq.push_back((noisy.points().row(2 * r) - noisy.points().row(2 * r + 1)).squaredNorm());
      }
    }
    auto check = [&](const std::vector<double>& v, double expected, const std::string& what) {
      double mean = 0, var = 0;
      for (double x : v) mean += x / static_cast<double>(v.size());
      for (double x : v) var += (x - mean) * (x - mean) / static_cast<double>(v.size() - 1);
      const double se = std::sqrt(var / static_cast<double>(v.size()));
      const double z = (mean - expected) / se;
      o.require(std::abs(z) <= 3, what + " at d=" + std::to_string(d) + " z=" + num(z));
      o.detail << what << "(d=" << d << ") z=" << num(z) << "; ";
    };
    check(noise_sq, 2 * sigma * sigma * static_cast<double>(d), "noise sq");
    check(total_sq, 2 * sigma * sigma * static_cast<double>(d) + delta * delta, "total sq");
  }

  GenSpec s;
  s.n = 60;
  const PointCloud circle = generate_manifold(s);
  double previous = 0;
  bool monotone = true;
  o.detail << "ratio";
  for (std::size_t d : {2, 10, 50, 500, 5000}) {
    const PointCloud clean = embed_isometric(circle, d, 4);
    const PointCloud noisy = add_gaussian_noise(clean, 0.25, 8);
    double acc = 0;
    int pairs = 0;
    for (int i = 0; i < 60; ++i)
      for (int j = 0; j < i; ++j) {
        const double noise =
            ((noisy.points().row(i) - clean.points().row(i)) - (noisy.points().row(j) - clean.points().row(j))).norm();
        acc += noise / (noisy.points().row(i) - noisy.points().row(j)).norm();
        ++pairs;
      }
    const double ratio = acc / pairs;
    o.detail << " " << num(ratio);
    monotone = monotone && ratio > previous;
    previous = ratio;
  }
  o.require(monotone, "noise/total ratio not increasing in d");
}

void distance_zoo(Outcome& o) {
  double worst_residual = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Matrix x = oracle::random_points(40, 2 + seed % 5, 12000 + seed);
    const DistanceMatrix e = euclidean(PointCloud(x));
    o.require(fermat(e, 1.0).values() == e.values(), "Fermat p=1 differs from Euclidean");

    const Vector v = dtm_values(e, 5, 2.0);
    const DistanceMatrix inf = dtm(e, 5, 2.0, kInfinityParam);
    const DistanceMatrix core = core_distance(e, 5);
    const DistanceMatrix geo = geodesic(e, 5);
    const NeighborLists nn = exact_knn(e, 5);
    bool dtm_exact = true, dominated = true;
    for (int i = 0; i < 40; ++i)
      for (int j = 0; j < 40; ++j) {
        if (i == j) continue;
        dtm_exact = dtm_exact && inf(i, j) == std::max({v[i], v[j], e(i, j) / 2});
        const double ri = e(i, nn[i].back()), rj = e(j, nn[j].back());
        dominated = dominated && core(i, j) >= std::max({e(i, j), ri, rj}) && geo(i, j) >= e(i, j) - 1e-12;
      }
    o.require(dtm_exact, "DTM xi=inf closed form");
    o.require(dominated, "core/geodesic domination");

    const AffinityDistances t = tsne_graph_distance(e, 5.0);
    const AffinityDistances u = umap_graph_distance(e, 10);
    worst_residual = std::max({worst_residual, t.calibration.max_residual, u.calibration.max_residual});
  }
  o.require(worst_residual < 1e-4, "calibration residual " + num(worst_residual));
  o.detail << "50 clouds; max calibration residual " << num(worst_residual);
}

void scoring(Outcome& o) {
  o.require(std::abs(hole_detection_score({5, 1, 0.5}, 1) - 0.8) < 1e-12, "{5,1,0.5} m=1");
  o.require(hole_detection_score({5, 1, 0.5}, 3) == 1.0, "exactly m features");
  o.require(hole_detection_score({5, 1, 0.5}, 4) == 0.0, "fewer than m features");
  o.require(widest_gap_score({5, 1, 0.5}, 1) == 1, "widest gap");
  PersistenceDiagram gated;
  gated.features = {{1, 1.0, 1.2, {}}, {1, 2.0, 2.2, {}}};
  o.require(score_diagram(gated, 1, 1).thresholded && score_diagram(gated, 1, 1).s_m == 0.0, "threshold gate");

  CounterRng rng(99);
  double worst_ratio = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> p(3 + trial % 6);
    for (double& x : p) x = 0.05 + rng.uniform();
    const double delta = 1e-4 + 1e-2 * rng.uniform();
    std::vector<double> q(p);
    for (double& x : q) x = std::max(0.0, x + delta * (2 * rng.uniform() - 1));
    std::vector<double> sorted(p);
    std::sort(sorted.rbegin(), sorted.rend());
    for (std::size_t m = 1; m < p.size(); ++m) {
      const double change = std::abs(hole_detection_score(q, m) - hole_detection_score(p, m));
      worst_ratio = std::max(worst_ratio, change * (sorted[m - 1] - delta) / delta);
    }
  }
  o.require(worst_ratio <= 2 + 1e-9, "continuity constant " + num(worst_ratio));
  o.detail << "examples hold; max |ds| * (p_m - delta) / delta = " << num(worst_ratio) << " (bound 2)";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"exact small-graph values", exact_values},
      {"resistance route equivalence", route_equivalence},
      {"series identities", series_identities},
      {"persistence vs brute-force Betti", oracle_equivalence},
      {"known diagrams", known_diagrams},
      {"circle benchmark", circle_reproduction},
      {"sphere negative control", sphere_control},
      {"concentration of noise", concentration},
      {"distance-zoo identities", distance_zoo},
      {"scoring", scoring}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first << ") ["
              << num(secs) << " s]: " << o.detail.str() << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
