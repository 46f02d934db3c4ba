#include "spectraph/bench.hpp"

#include "spectraph/basedist.hpp"
#include "spectraph/rng.hpp"
#include "spectraph/spectral.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace spectraph {

using nlohmann::json;

namespace {

enum class Kind { positive_int, positive_number, number_or_inf, boolean, text };

struct Param {
  const char* key;
  Kind kind;
  json fallback;
  std::vector<std::string> choices = {};
};

const std::map<std::string, std::vector<Param>>& registry() {
  static const std::map<std::string, std::vector<Param>> r = [] {
    const Param base{"base", Kind::text, "euclidean", {"euclidean", "correlation"}};
    const Param k{"k", Kind::positive_int, 15};
    std::map<std::string, std::vector<Param>> m;
    m["euclidean"] = {};
    m["correlation"] = {};
    m["fermat"] = {base, {"p", Kind::positive_number, 2.0}, {"graph", Kind::text, "complete", {"complete", "knn"}}, k};
    m["dtm"] = {base, k, {"p", Kind::number_or_inf, 2.0}, {"xi", Kind::number_or_inf, 1.0}};
    m["core"] = {base, k};
    m["geodesic"] = {base, k};
    m["tsne"] = {base, {"perplexity", Kind::positive_number, 30.0}};
    m["umap"] = {base, k};
    m["eff_res"] = {base, k, {"corrected", Kind::boolean, true}, {"weighted", Kind::boolean, false},
                    {"sqrt", Kind::boolean, false}};
    m["diffusion"] = {base, k, {"t", Kind::positive_number, 8.0}};
    m["lap_eig"] = {base, k, {"dim", Kind::positive_int, 2}};
    m["dpt"] = {base, k, {"variant", Kind::text, "symd", {"rw", "sym", "symd"}}};
    m["potential"] = {base, k, {"t", Kind::positive_int, 8}};
    m["pca"] = {{"components", Kind::positive_int, 2}, {"normalized", Kind::boolean, false}};
    return m;
  }();
  return r;
}

double as_number(const json& v) {
  if (v.is_string() && v.get<std::string>() == "inf") return kInfinityParam;
  return v.get<double>();
}

json check_param(const std::string& distance, const Param& p, const json& v) {
  const std::string where = distance + "." + p.key;
  switch (p.kind) {
    case Kind::positive_int:
      if (!v.is_number_integer() || v.get<long long>() < 1) throw std::invalid_argument(where + " must be a positive integer");
      return v;
    case Kind::positive_number:
      if (!v.is_number() || !(v.get<double>() > 0)) throw std::invalid_argument(where + " must be a positive number");
      return v;
    case Kind::number_or_inf:
      if (!(v.is_number() || (v.is_string() && v.get<std::string>() == "inf")))
        throw std::invalid_argument(where + " must be a number or \"inf\"");
      return v;
    case Kind::boolean:
      if (!v.is_boolean()) throw std::invalid_argument(where + " must be true or false");
      return v;
    case Kind::text:
      if (!v.is_string() || std::find(p.choices.begin(), p.choices.end(), v.get<std::string>()) == p.choices.end())
        throw std::invalid_argument(where + " has an unsupported value");
      return v;
  }
  return v;
}

std::string value_label(const json& v) {
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  return detail::format_double(v.get<double>());
}

std::size_t param_k(const DistanceSpec& s) { return s.params.at("k").get<std::size_t>(); }

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
  return s;
}

}  // namespace

std::vector<std::string> distance_names() {
  std::vector<std::string> out;
  for (const auto& [name, _] : registry()) out.push_back(name);
  return out;
}

DistanceSpec make_distance_spec(const std::string& name, const json& params) {
  auto it = registry().find(name);
  if (it == registry().end()) throw std::invalid_argument("unknown distance '" + name + "'");
  if (!params.is_null() && !params.is_object()) throw std::invalid_argument("params of " + name + " must be an object");
  DistanceSpec spec{name, json::object()};
  for (const Param& p : it->second) {
    const bool given = params.is_object() && params.contains(p.key);
    spec.params[p.key] = check_param(name, p, given ? params.at(p.key) : p.fallback);
  }
  if (params.is_object())
    for (const auto& [key, _] : params.items())
      if (!spec.params.contains(key)) throw std::invalid_argument("unknown parameter '" + key + "' for " + name);
  return spec;
}

std::string params_label(const DistanceSpec& spec) {
  std::string out;
  for (const auto& [key, value] : spec.params.items()) {
    if (!out.empty()) out += ';';
    out += key + "=" + value_label(value);
  }
  return out;
}

DistanceMatrix compute_distance(const PointCloud& pc, const DistanceSpec& spec, std::vector<std::string>* warnings) {
  const std::string& name = spec.name;
  const json& p = spec.params;
  if (name == "euclidean") return finitize(euclidean(pc));
  if (name == "correlation") return finitize(correlation_distance(pc));
  if (name == "pca") {
    const PointCloud proj = pca_preprocess(pc, p.at("components").get<std::size_t>(), p.at("normalized").get<bool>());
    return finitize(euclidean(proj));
  }

  const DistanceMatrix base = p.at("base") == "correlation" ? correlation_distance(pc) : euclidean(pc);
  if (name == "fermat") {
    const FermatGraph g = p.at("graph") == "knn" ? FermatGraph::knn : FermatGraph::complete;
    return finitize(fermat(base, p.at("p").get<double>(), g, param_k(spec)));
  }
  if (name == "dtm") return finitize(dtm(base, param_k(spec), as_number(p.at("p")), as_number(p.at("xi"))));
  if (name == "core") return finitize(core_distance(base, param_k(spec)));
  if (name == "geodesic") return finitize(geodesic(base, param_k(spec)));
  if (name == "tsne") return finitize(tsne_graph_distance(base, p.at("perplexity").get<double>()).distances);
  if (name == "umap") return finitize(umap_graph_distance(base, param_k(spec)).distances);

  const bool weighted = name == "eff_res" && p.at("weighted").get<bool>();
  const NeighborGraph g = knn_graph(base, param_k(spec), weighted);
  if (name == "potential") return finitize(potential_distance(g, p.at("t").get<int>()));
  const SpectralDecomposition dec = eigendecompose(g);
  if (name == "eff_res") {
    if (p.at("corrected").get<bool>()) return finitize(effective_resistance_corrected(dec, p.at("sqrt").get<bool>()));
    const DistanceMatrix naive = effective_resistance_naive(dec);
    return finitize(p.at("sqrt").get<bool>() ? naive.sqrt() : naive);
  }
  if (name == "diffusion") {
    if (warnings && dec.near_bipartite()) warnings->push_back("near-bipartite graph");
    return finitize(diffusion_distance(dec, p.at("t").get<double>()));
  }
  if (name == "lap_eig") return finitize(laplacian_eigenmaps_distance(dec, p.at("dim").get<std::size_t>()));
  if (name == "dpt") return finitize(dpt_distance(dec, parse_dpt_variant(p.at("variant").get<std::string>())));
  throw std::invalid_argument("unknown distance '" + name + "'");
}

std::vector<double> default_sigma_grid() {
  std::vector<double> grid(29);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = kMaxBenchmarkSigma * static_cast<double>(i) / 28.0;
  return grid;
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  static const std::vector<std::string> known = {"datasets", "sigma_grid", "dim_grid",  "distances",     "seeds",
                                                 "max_dim",  "threshold",  "output_dir", "save_diagrams"};
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw std::invalid_argument("unknown config key '" + key + "'");

  ExperimentConfig c;
  c.max_dim = j.value("max_dim", 1);
  if (c.max_dim < 1 || c.max_dim > 2) throw std::invalid_argument("max_dim must be 1 or 2");
  c.threshold = j.value("threshold", true);
  c.save_diagrams = j.value("save_diagrams", false);
  c.output_dir = j.value("output_dir", std::string("results"));
  c.sigma_grid = j.contains("sigma_grid") ? j.at("sigma_grid").get<std::vector<double>>() : default_sigma_grid();
  c.dim_grid = j.contains("dim_grid") ? j.at("dim_grid").get<std::vector<std::size_t>>() : std::vector<std::size_t>{50};
  c.seeds = j.contains("seeds") ? j.at("seeds").get<std::vector<std::uint64_t>>() : std::vector<std::uint64_t>{0, 1, 2};
  for (double s : c.sigma_grid)
    if (!(s >= 0)) throw std::invalid_argument("sigma_grid entries must be non-negative");
  for (std::size_t d : c.dim_grid)
    if (d < 1) throw std::invalid_argument("dim_grid entries must be positive");

  if (!j.contains("datasets") || !j.at("datasets").is_array() || j.at("datasets").empty())
    throw std::invalid_argument("config needs a non-empty 'datasets' array");
  for (const json& d : j.at("datasets")) {
    DatasetSpec ds;
    ds.manifold = parse_manifold(d.at("manifold").get<std::string>());
    ds.name = d.value("name", std::string(manifold_name(ds.manifold)));
    ds.n = d.value("n", std::size_t{300});
    ds.outliers = d.value("outliers", std::size_t{0});
    if (!d.contains("m_truth")) throw std::invalid_argument("dataset '" + ds.name + "' needs m_truth");
    for (const auto& [dim, m] : d.at("m_truth").items()) {
      const int k = std::stoi(dim);
      if (k < 1 || k > c.max_dim) continue;
      ds.m_truth[k] = m.get<std::size_t>();
    }
    for (int k = 1; k <= c.max_dim; ++k)
      if (!ds.m_truth.count(k))
        throw std::invalid_argument("dataset '" + ds.name + "' lacks m_truth for dim " + std::to_string(k));
    c.datasets.push_back(std::move(ds));
  }

  if (!j.contains("distances") || !j.at("distances").is_array() || j.at("distances").empty())
    throw std::invalid_argument("config needs a non-empty 'distances' array");
  for (const json& d : j.at("distances"))
    c.distances.push_back(make_distance_spec(d.at("name").get<std::string>(), d.value("params", json::object())));
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  return parse_config(json::parse(in));
}

std::vector<Cell> enumerate_cells(const ExperimentConfig& config) {
  std::vector<Cell> cells;
  for (std::size_t ds = 0; ds < config.datasets.size(); ++ds)
    for (std::size_t si = 0; si < config.sigma_grid.size(); ++si)
      for (std::size_t dim : config.dim_grid)
        for (std::size_t di = 0; di < config.distances.size(); ++di)
          for (std::uint64_t seed : config.seeds) cells.push_back({ds, si, config.sigma_grid[si], dim, di, seed});
  return cells;
}

PointCloud cell_point_cloud(const DatasetSpec& dataset, const Cell& cell, std::uint64_t base_seed) {
  GenSpec g;
  g.manifold = dataset.manifold;
  g.n = dataset.n;
  g.ambient_dim = cell.ambient_dim;
  g.noise_sigma = cell.sigma;
  g.outlier_count = dataset.outliers;
  g.seed = cell_seed(base_seed, dataset.name, cell.sigma_index, cell.seed);
  return generate(g);
}

CellResult run_cell(const ExperimentConfig& config, const Cell& cell, std::uint64_t base_seed) {
  const DatasetSpec& ds = config.datasets.at(cell.dataset);
  const DistanceSpec& dist = config.distances.at(cell.distance);
  CellResult out;
  out.cell = cell;
  ScoreRow proto;
  proto.dataset = ds.name;
  proto.distance = dist.name;
  proto.params = params_label(dist);
  proto.sigma = cell.sigma;
  proto.ambient_dim = cell.ambient_dim;
  proto.seed = cell.seed;
  try {
    std::vector<std::string> warnings;
    const PointCloud pc = cell_point_cloud(ds, cell, base_seed);
    const DistanceMatrix d = compute_distance(pc, dist, &warnings);
    RipsOptions opts;
    opts.max_dim = config.max_dim;
    out.diagram = rips_persistence(d, opts);
    for (const auto& [k, m] : ds.m_truth) {
      ScoreRow row = proto;
      row.dim = k;
      row.m = m;
      // A negative control (m = 0) reports the score of the single most persistent feature.
      const ScoreReport r = score_diagram(out.diagram, k, std::max<std::size_t>(m, 1), config.threshold);
      row.s_m = r.s_m;
      row.thresholded = r.thresholded;
      row.widest_gap = m == 0 ? 0 : r.widest_gap_correct;
      if (!warnings.empty()) row.status = "ok; warning: " + sanitize(warnings.front());
      out.rows.push_back(row);
    }
  } catch (const std::exception& e) {
    out.rows.clear();
    for (const auto& [k, m] : ds.m_truth) {
      ScoreRow row = proto;
      row.dim = k;
      row.m = m;
      row.s_m = std::nan("");
      row.status = "error: " + sanitize(e.what());
      out.rows.push_back(row);
    }
  }
  return out;
}

void sort_rows(std::vector<ScoreRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ScoreRow& a, const ScoreRow& b) {
    return std::tie(a.dataset, a.distance, a.params, a.ambient_dim, a.sigma, a.seed, a.dim) <
           std::tie(b.dataset, b.distance, b.params, b.ambient_dim, b.sigma, b.seed, b.dim);
  });
}

SweepResult run_sweep(const ExperimentConfig& config, std::size_t threads, std::uint64_t base_seed) {
  const std::vector<Cell> cells = enumerate_cells(config);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("SPECTRAPH_THREADS")) {
    const long v = std::strtol(cap, nullptr, 10);
    if (v >= 1) threads = std::min(threads, static_cast<std::size_t>(v));
  }
  threads = std::max<std::size_t>(1, std::min(threads, cells.size()));

  SweepResult result;
  result.cells.resize(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) result.cells[i] = run_cell(config, cells[i], base_seed);
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& c : result.cells) result.rows.insert(result.rows.end(), c.rows.begin(), c.rows.end());
  sort_rows(result.rows);
  return result;
}

void write_scores_csv(std::ostream& out, const std::vector<ScoreRow>& rows) {
  out << "# spectraph-scores v1\n";
  out << "dataset,distance,params,sigma,ambient_dim,dim,m,seed,s_m,thresholded,widest_gap,status\n";
  for (const auto& r : rows) {
    out << r.dataset << ',' << r.distance << ',' << r.params << ',' << detail::format_double(r.sigma) << ','
        << r.ambient_dim << ',' << r.dim << ',' << r.m << ',' << r.seed << ','
        << (std::isnan(r.s_m) ? std::string() : detail::format_double(r.s_m)) << ',' << (r.thresholded ? 1 : 0) << ','
        << r.widest_gap << ',' << r.status << '\n';
  }
}

json summarize(const std::vector<ScoreRow>& rows) {
  using Key = std::tuple<std::string, std::string, std::string, double, std::size_t, int>;
  struct Acc {
    std::size_t m = 0;
    std::vector<double> s;
    double widest = 0, thresholded = 0;
    std::size_t failed = 0;
  };
  std::map<Key, Acc> groups;
  for (const auto& r : rows) {
    Acc& a = groups[{r.dataset, r.distance, r.params, r.sigma, r.ambient_dim, r.dim}];
    a.m = r.m;
    if (r.status.rfind("ok", 0) != 0) {
      ++a.failed;
      continue;
    }
    a.s.push_back(r.s_m);
    a.widest += r.widest_gap;
    a.thresholded += r.thresholded ? 1 : 0;
  }
  json out = json::array();
  for (const auto& [key, a] : groups) {
    json g;
    g["dataset"] = std::get<0>(key);
    g["distance"] = std::get<1>(key);
    g["params"] = std::get<2>(key);
    g["sigma"] = std::get<3>(key);
    g["ambient_dim"] = std::get<4>(key);
    g["dim"] = std::get<5>(key);
    g["m"] = a.m;
    g["count"] = a.s.size();
    g["failed"] = a.failed;
    if (!a.s.empty()) {
      const double count = static_cast<double>(a.s.size());
      double mean = 0;
      for (double v : a.s) mean += v;
      mean /= count;
      double var = 0;
      for (double v : a.s) var += (v - mean) * (v - mean);
      g["mean_s_m"] = mean;
      g["sd_s_m"] = std::sqrt(var / count);
      g["widest_gap_rate"] = a.widest / count;
      g["thresholded_rate"] = a.thresholded / count;
    } else {
      g["mean_s_m"] = nullptr;
      g["sd_s_m"] = nullptr;
      g["widest_gap_rate"] = nullptr;
      g["thresholded_rate"] = nullptr;
    }
    out.push_back(std::move(g));
  }
  return json{{"format", "spectraph-summary v1"}, {"groups", std::move(out)}};
}

void write_sweep_outputs(const ExperimentConfig& config, const SweepResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(config.output_dir);
  {
    std::ofstream out(fs::path(config.output_dir) / "scores.csv");
    if (!out) throw std::runtime_error("cannot write scores.csv in " + config.output_dir);
    write_scores_csv(out, result.rows);
  }
  {
    std::ofstream out(fs::path(config.output_dir) / "summary.json");
    if (!out) throw std::runtime_error("cannot write summary.json in " + config.output_dir);
    out << summarize(result.rows).dump(2) << '\n';
  }
  if (!config.save_diagrams) return;
  const fs::path dir = fs::path(config.output_dir) / "diagrams";
  fs::create_directories(dir);
  for (const auto& c : result.cells) {
    if (c.rows.empty() || c.rows.front().status.rfind("ok", 0) != 0) continue;
    const auto& r = c.rows.front();
    const std::string file = r.dataset + "_" + r.distance + "_c" + std::to_string(c.cell.distance) + "_d" +
                             std::to_string(r.ambient_dim) + "_s" + std::to_string(c.cell.sigma_index) + "_seed" +
                             std::to_string(r.seed) + ".csv";
    save_diagram_csv((dir / file).string(), c.diagram);
  }
}

}  // namespace spectraph
