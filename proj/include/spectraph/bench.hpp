#pragma once

#include "spectraph/distance_matrix.hpp"
#include "spectraph/rips.hpp"
#include "spectraph/scoring.hpp"
#include "spectraph/synthgen.hpp"

#include "json.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace spectraph {

/// A registered distance with its hyperparameters; `params` holds every key of
/// the distance's schema after defaults are filled in.
struct DistanceSpec {
  std::string name;
  nlohmann::json params = nlohmann::json::object();
};

/// Validates name and parameters against the registry and fills defaults.
DistanceSpec make_distance_spec(const std::string& name, const nlohmann::json& params = nlohmann::json::object());

/// Registered distance names.
std::vector<std::string> distance_names();

/// "key=value" pairs joined by ';' in key order, e.g. "k=15;t=8".
std::string params_label(const DistanceSpec& spec);

/// Computes the distance on pc and finitizes it. Appends non-fatal notes (such
/// as a near-bipartite graph) to `warnings` when given.
DistanceMatrix compute_distance(const PointCloud& pc, const DistanceSpec& spec,
                                std::vector<std::string>* warnings = nullptr);

struct DatasetSpec {
  std::string name;
  Manifold manifold = Manifold::circle;
  std::size_t n = 300;
  std::size_t outliers = 0;
  std::map<int, std::size_t> m_truth;  // homology dim -> feature count; 0 marks a negative control
};

struct ExperimentConfig {
  std::vector<DatasetSpec> datasets;
  std::vector<double> sigma_grid;
  std::vector<std::size_t> dim_grid;
  std::vector<DistanceSpec> distances;
  std::vector<std::uint64_t> seeds;
  int max_dim = 1;
  bool threshold = true;
  bool save_diagrams = false;
  std::string output_dir = "results";
};

/// linspace(0, 0.35, 29).
std::vector<double> default_sigma_grid();

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

struct Cell {
  std::size_t dataset = 0;
  std::size_t sigma_index = 0;
  double sigma = 0.0;
  std::size_t ambient_dim = 50;
  std::size_t distance = 0;
  std::uint64_t seed = 0;
};

/// One score row: a cell and one scored homology dimension.
struct ScoreRow {
  std::string dataset, distance, params;
  double sigma = 0.0;
  std::size_t ambient_dim = 0;
  int dim = 1;
  std::size_t m = 1;
  std::uint64_t seed = 0;
  double s_m = 0.0;
  bool thresholded = false;
  int widest_gap = 0;
  std::string status = "ok";
};

struct CellResult {
  Cell cell;
  PersistenceDiagram diagram;
  std::vector<ScoreRow> rows;
};

/// Point cloud of a cell: the dataset at the cell's noise level and ambient dimension.
PointCloud cell_point_cloud(const DatasetSpec& dataset, const Cell& cell, std::uint64_t base_seed = 0);

/// generate -> embed -> noise -> distance -> persistence -> score. Failures are
/// caught and reported in the rows' status column.
CellResult run_cell(const ExperimentConfig& config, const Cell& cell, std::uint64_t base_seed = 0);

/// Every (dataset, sigma, ambient dim, distance, seed) combination, in config order.
std::vector<Cell> enumerate_cells(const ExperimentConfig& config);

struct SweepResult {
  std::vector<ScoreRow> rows;  // sorted, see sort_rows
  std::vector<CellResult> cells;
};

/// Runs all cells on up to `threads` workers (0: hardware concurrency, capped by
/// SPECTRAPH_THREADS).
SweepResult run_sweep(const ExperimentConfig& config, std::size_t threads = 0, std::uint64_t base_seed = 0);

/// Orders by dataset, distance, params, ambient_dim, sigma, seed, dim.
void sort_rows(std::vector<ScoreRow>& rows);

void write_scores_csv(std::ostream& out, const std::vector<ScoreRow>& rows);

/// Mean and population standard deviation of s_m per (dataset, distance, params,
/// sigma, ambient_dim, dim) over the rows with status "ok".
nlohmann::json summarize(const std::vector<ScoreRow>& rows);

/// Writes scores.csv, summary.json and, if requested, per-cell diagrams into output_dir.
void write_sweep_outputs(const ExperimentConfig& config, const SweepResult& result);

}  // namespace spectraph
