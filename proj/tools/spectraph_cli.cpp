// spectraph command line: data generation, distances, persistence, scoring and sweeps.

#include "spectraph/basedist.hpp"
#include "spectraph/bench.hpp"
#include "spectraph/csv_io.hpp"
#include "spectraph/knn_graph.hpp"
#include "spectraph/rips.hpp"
#include "spectraph/scoring.hpp"
#include "spectraph/synthgen.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <memory>

namespace {

using namespace spectraph;

// Writes to `path`, or stdout when it is empty or "-".
template <class F>
void with_output(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write(out);
}

nlohmann::json parse_params(const std::vector<std::string>& pairs) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& kv : pairs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--param", "expected key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
    auto parsed = nlohmann::json::parse(value, nullptr, false);
    params[key] = parsed.is_discarded() || parsed.is_object() || parsed.is_array() ? nlohmann::json(value) : parsed;
  }
  return params;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Persistent homology of noisy point clouds over a catalog of distances"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "Sample a synthetic manifold, embed it and add noise");
  std::string manifold = "circle", gen_out;
  std::size_t gen_n = 300, gen_dim = 50, gen_outliers = 0;
  double gen_sigma = 0.0;
  std::uint64_t seed = 0;
  gen->add_option("--manifold", manifold, "circle, linked_circles, eyeglasses, sphere or torus")->capture_default_str();
  gen->add_option("--n", gen_n, "Number of points")->capture_default_str();
  gen->add_option("--dim", gen_dim, "Ambient dimension")->capture_default_str();
  gen->add_option("--sigma", gen_sigma, "Gaussian noise level")->capture_default_str();
  gen->add_option("--outliers", gen_outliers, "Number of uniform outliers")->capture_default_str();
  gen->add_option("--seed", seed, "Random seed")->capture_default_str();
  gen->add_option("--output,-o", gen_out, "Point CSV (default stdout)");

  auto* dist = app.add_subcommand("distance", "Compute a distance matrix from a point CSV");
  std::string dist_in, dist_name = "euclidean", dist_out, edges_out;
  std::vector<std::string> dist_params;
  dist->add_option("--input,-i", dist_in, "Point CSV")->required()->check(CLI::ExistingFile);
  dist->add_option("--name", dist_name, "Distance name")->capture_default_str();
  dist->add_option("--param,-p", dist_params, "Hyperparameter key=value (repeatable)");
  dist->add_option("--output,-o", dist_out, "Distance CSV (default stdout)");
  dist->add_option("--edges", edges_out, "Also write the symmetric kNN graph used by graph-based distances");

  auto* ph = app.add_subcommand("ph", "Vietoris-Rips persistence of a distance matrix");
  std::string ph_in, ph_out, cycles_out;
  int ph_max_dim = 1;
  double ph_threshold = -1;
  bool ph_h0 = false;
  ph->add_option("--input,-i", ph_in, "Distance CSV")->required()->check(CLI::ExistingFile);
  ph->add_option("--max-dim", ph_max_dim, "Highest homology dimension (1 or 2)")->check(CLI::Range(1, 2));
  ph->add_option("--threshold", ph_threshold, "Filtration cap (default: enclosing radius)");
  ph->add_flag("--h0", ph_h0, "Include H0 features");
  ph->add_option("--cycles", cycles_out, "Write representative H1 cycles as feature_id,u,v");
  ph->add_option("--output,-o", ph_out, "Diagram CSV (default stdout)");

  auto* score = app.add_subcommand("score", "Hole-detection score of a diagram");
  std::string diagram_in;
  int score_dim = 1;
  std::size_t score_m = 1;
  bool no_threshold = false;
  double ratio = kDefaultRatioThreshold;
  score->add_option("--diagram,-d", diagram_in, "Diagram CSV")->required()->check(CLI::ExistingFile);
  score->add_option("--dim", score_dim, "Homology dimension")->capture_default_str();
  score->add_option("--m", score_m, "Expected number of features")->check(CLI::PositiveNumber)->capture_default_str();
  score->add_flag("--no-threshold", no_threshold, "Disable the death/birth ratio gate");
  score->add_option("--ratio", ratio, "Death/birth ratio of the gate")->capture_default_str();

  auto* bench = app.add_subcommand("bench", "Run a benchmark sweep from a JSON config");
  std::string config_path, bench_out;
  std::size_t threads = 0;
  bench->add_option("--config,-c", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  bench->add_option("--threads", threads, "Worker threads (0: all cores)")->capture_default_str();
  bench->add_option("--output,-o", bench_out, "Output directory (overrides the config)");
  bench->add_option("--seed", seed, "Base seed mixed into every cell")->capture_default_str();
  bench->add_flag("--no-threshold", no_threshold, "Disable the death/birth ratio gate");

  auto* oracle = app.add_subcommand("oracle", "Brute-force Betti numbers at one scale (n <= 10)");
  std::string oracle_in;
  double tau = 0;
  int oracle_max_dim = 1;
  oracle->add_option("--input,-i", oracle_in, "Distance CSV")->required()->check(CLI::ExistingFile);
  oracle->add_option("--tau", tau, "Scale")->required();
  oracle->add_option("--max-dim", oracle_max_dim, "Highest dimension")->check(CLI::Range(0, 2));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*gen) {
      GenSpec spec;
      spec.manifold = parse_manifold(manifold);
      spec.n = gen_n;
      spec.ambient_dim = gen_dim;
      spec.noise_sigma = gen_sigma;
      spec.outlier_count = gen_outliers;
      spec.seed = seed;
      const PointCloud pc = generate(spec);
      with_output(gen_out, [&](std::ostream& o) { write_point_cloud_csv(o, pc); });
    } else if (*dist) {
      const DistanceSpec spec = make_distance_spec(dist_name, parse_params(dist_params));
      const PointCloud pc = load_csv(dist_in);
      std::vector<std::string> warnings;
      const DistanceMatrix d = compute_distance(pc, spec, &warnings);
      for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
      with_output(dist_out, [&](std::ostream& o) { write_distance_csv(o, d); });
      if (!edges_out.empty()) {
        if (!spec.params.contains("k")) throw std::invalid_argument(dist_name + " does not use a kNN graph");
        const DistanceMatrix base =
            spec.params.at("base") == "correlation" ? correlation_distance(pc) : euclidean(pc);
        const bool weighted = spec.params.value("weighted", false);
        const NeighborGraph g = knn_graph(base, spec.params.at("k").get<std::size_t>(), weighted);
        with_output(edges_out, [&](std::ostream& o) { write_edge_csv(o, g); });
      }
    } else if (*ph) {
      const DistanceMatrix d = load_distance_csv(ph_in);
      RipsOptions opts;
      opts.max_dim = ph_max_dim;
      opts.include_h0 = ph_h0;
      if (ph_threshold >= 0) opts.threshold = ph_threshold;
      const PersistenceDiagram diagram = rips_persistence(d, opts);
      with_output(ph_out, [&](std::ostream& o) { write_diagram_csv(o, diagram); });
      if (!cycles_out.empty()) {
        std::vector<std::pair<std::size_t, std::vector<Edge>>> cycles;
        for (std::size_t i = 0; i < diagram.features.size(); ++i)
          if (diagram.features[i].dim == 1) cycles.emplace_back(i, representative_cycle(d, diagram.features[i]));
        with_output(cycles_out, [&](std::ostream& o) { write_cycles_csv(o, cycles); });
      }
    } else if (*score) {
      const PersistenceDiagram diagram = load_diagram_csv(diagram_in);
      const ScoreReport r = score_diagram(diagram, score_dim, score_m, !no_threshold, ratio);
      std::cout << "s_" << r.m << " = " << r.s_m << "\n";
      std::cout << "thresholded = " << (r.thresholded ? "true" : "false") << "\n";
      std::cout << "widest_gap_correct = " << r.widest_gap_correct << "\n";
    } else if (*bench) {
      ExperimentConfig config;
      try {
        config = load_config(config_path);
      } catch (const std::exception& e) {
        std::cerr << "invalid config: " << e.what() << '\n';
        return 1;
      }
      if (!bench_out.empty()) config.output_dir = bench_out;
      if (no_threshold) config.threshold = false;
      const SweepResult result = run_sweep(config, threads, seed);
      write_sweep_outputs(config, result);
      std::size_t failed = 0;
      for (const auto& r : result.rows) failed += r.status.rfind("ok", 0) != 0;
      std::cerr << result.cells.size() << " cells, " << result.rows.size() << " rows, " << failed
                << " failed rows; wrote " << config.output_dir << "/scores.csv and summary.json\n";
    } else if (*oracle) {
      const DistanceMatrix d = load_distance_csv(oracle_in);
      const auto betti = brute_force_betti(d, tau, oracle_max_dim);
      for (std::size_t k = 0; k < betti.size(); ++k) std::cout << "beta_" << k << " = " << betti[k] << "\n";
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
