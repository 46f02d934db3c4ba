#include "doctest.h"

#include "spectraph/bench.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace spectraph;
using nlohmann::json;

namespace {

json small_config() {
  return json::parse(R"({
    "datasets": [
      {"name": "circle", "manifold": "circle", "n": 40, "m_truth": {"1": 1}},
      {"name": "noise", "manifold": "sphere", "n": 40, "m_truth": {"1": 0}}
    ],
    "sigma_grid": [0.0, 0.1, 0.2],
    "dim_grid": [10],
    "distances": [{"name": "eff_res", "params": {"k": 8}}],
    "seeds": [0, 1, 2]
  })");
}

std::string scores_text(const SweepResult& r) {
  std::ostringstream out;
  write_scores_csv(out, r.rows);
  return out.str();
}

struct CliResult {
  int code;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + SPECTRAPH_CLI_PATH + "\" " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("spectraph_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("bench") {
  TEST_CASE("distance registry fills defaults and rejects bad parameters") {
    const DistanceSpec d = make_distance_spec("diffusion");
    CHECK(d.params.at("k") == 15);
    CHECK(d.params.at("t") == 8);
    CHECK(params_label(d) == "base=euclidean;k=15;t=8");
    CHECK(params_label(make_distance_spec("euclidean")).empty());
    CHECK(make_distance_spec("eff_res").params.at("corrected") == true);
    CHECK_THROWS(make_distance_spec("nope"));
    CHECK_THROWS(make_distance_spec("diffusion", {{"k", 0}}));
    CHECK_THROWS(make_distance_spec("diffusion", {{"k", 2.5}}));
    CHECK_THROWS(make_distance_spec("diffusion", {{"bogus", 1}}));
    CHECK_THROWS(make_distance_spec("dpt", {{"variant", "other"}}));
    CHECK_NOTHROW(make_distance_spec("dtm", {{"xi", "inf"}, {"p", "inf"}}));
    CHECK_THROWS(make_distance_spec("diffusion", {{"t", "inf"}}));
    const auto names = distance_names();
    for (const char* n : {"euclidean", "eff_res", "diffusion", "dpt", "lap_eig", "tsne", "umap", "fermat", "dtm",
                          "geodesic", "core", "correlation", "potential", "pca"})
      CHECK(std::find(names.begin(), names.end(), n) != names.end());
  }

  TEST_CASE("every registered distance runs on a small cloud") {
    GenSpec g;
    g.n = 40;
    g.ambient_dim = 5;
    g.noise_sigma = 0.05;
    const PointCloud pc = generate(g);
    for (const auto& name : distance_names()) {
      json params = json::object();
      const DistanceSpec base = make_distance_spec(name);
      if (base.params.contains("k")) params["k"] = 8;
      if (base.params.contains("perplexity")) params["perplexity"] = 5;
      const DistanceMatrix d = compute_distance(pc, make_distance_spec(name, params));
      CHECK(d.size() == 40);
      CHECK(d.values().allFinite());
      CHECK((d.values() - d.values().transpose()).cwiseAbs().maxCoeff() < 1e-9);
    }
  }

  TEST_CASE("config validation") {
    CHECK_NOTHROW(parse_config(small_config()));
    json bad = small_config();
    bad["unknown"] = 1;
    CHECK_THROWS(parse_config(bad));
    bad = small_config();
    bad["datasets"][0].erase("m_truth");
    CHECK_THROWS(parse_config(bad));
    bad = small_config();
    bad["max_dim"] = 2;
    CHECK_THROWS(parse_config(bad));
    bad = small_config();
    bad["sigma_grid"] = {-0.1};
    CHECK_THROWS(parse_config(bad));
    bad = small_config();
    bad["datasets"][0]["manifold"] = "klein";
    CHECK_THROWS(parse_config(bad));
    json minimal = small_config();
    minimal.erase("sigma_grid");
    minimal.erase("seeds");
    const ExperimentConfig c = parse_config(minimal);
    CHECK(c.sigma_grid.size() == 29);
    CHECK(c.sigma_grid.back() == doctest::Approx(0.35));
    CHECK(c.seeds == std::vector<std::uint64_t>{0, 1, 2});
  }

  TEST_CASE("sweep produces one row per cell and dimension, deterministically") {
    const ExperimentConfig c = parse_config(small_config());
    CHECK(enumerate_cells(c).size() == 18);
    const SweepResult a = run_sweep(c, 1);
    const SweepResult b = run_sweep(c, 3);
    REQUIRE(a.rows.size() == 18);
    CHECK(scores_text(a) == scores_text(b));
    for (const auto& r : a.rows) {
      CHECK(r.status.rfind("ok", 0) == 0);
      CHECK(r.s_m >= 0.0);
      CHECK(r.s_m <= 1.0);
      if (r.dataset == "noise") CHECK(r.widest_gap == 0);
    }
    CHECK(std::is_sorted(a.rows.begin(), a.rows.end(), [](const ScoreRow& x, const ScoreRow& y) {
      return std::tie(x.dataset, x.sigma, x.seed) < std::tie(y.dataset, y.sigma, y.seed);
    }));
    // Different base seeds change the data.
    CHECK(scores_text(run_sweep(c, 1, 99)) != scores_text(a));
  }

  TEST_CASE("summary matches a hand-computed mean and population SD") {
    const ExperimentConfig c = parse_config(small_config());
    const SweepResult r = run_sweep(c, 1);
    const json s = summarize(r.rows);
    REQUIRE(s.at("groups").size() == 6);
    for (const json& g : s.at("groups")) {
      std::vector<double> v;
      for (const auto& row : r.rows)
        if (row.dataset == g.at("dataset") && row.sigma == g.at("sigma").get<double>()) v.push_back(row.s_m);
      REQUIRE(v.size() == 3);
      const double mean = (v[0] + v[1] + v[2]) / 3;
      double var = 0;
      for (double x : v) var += (x - mean) * (x - mean);
      CHECK(g.at("mean_s_m").get<double>() == doctest::Approx(mean).epsilon(1e-12));
      CHECK(g.at("sd_s_m").get<double>() == doctest::Approx(std::sqrt(var / 3)).epsilon(1e-9));
      CHECK(g.at("count") == 3);
    }
  }

  TEST_CASE("a failing cell is reported without stopping the sweep") {
    json j = small_config();
    j["datasets"].push_back({{"name", "tiny"}, {"manifold", "circle"}, {"n", 5}, {"m_truth", {{"1", 1}}}});
    const SweepResult r = run_sweep(parse_config(j), 2);
    REQUIRE(r.rows.size() == 27);
    std::size_t errors = 0;
    for (const auto& row : r.rows) {
      if (row.dataset == "tiny") {
        CHECK(row.status.rfind("error: ", 0) == 0);
        CHECK(std::isnan(row.s_m));
        ++errors;
      } else {
        CHECK(row.status.rfind("ok", 0) == 0);
      }
    }
    CHECK(errors == 9);
    const std::string csv = scores_text(r);
    CHECK(csv.find(",,0,0,error: ") != std::string::npos);
    const json s = summarize(r.rows);
    bool saw_failed = false;
    for (const json& g : s.at("groups"))
      if (g.at("dataset") == "tiny") {
        CHECK(g.at("failed") == 3);
        CHECK(g.at("count") == 0);
        saw_failed = true;
      }
    CHECK(saw_failed);
  }

  TEST_CASE("sweep outputs on disk") {
    ExperimentConfig c = parse_config(small_config());
    c.output_dir = temp_dir("outputs").string();
    c.save_diagrams = true;
    write_sweep_outputs(c, run_sweep(c, 1));
    const std::filesystem::path dir(c.output_dir);
    CHECK(std::filesystem::exists(dir / "scores.csv"));
    CHECK(std::filesystem::exists(dir / "summary.json"));
    std::size_t diagrams = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir / "diagrams")) diagrams += e.is_regular_file();
    CHECK(diagrams == 18);
    std::ifstream in(dir / "summary.json");
    CHECK_NOTHROW((void)json::parse(in));
    std::filesystem::remove_all(dir);
  }
}

TEST_SUITE("cli") {
  TEST_CASE("exit codes") {
    CHECK(run_cli("--help").code == 0);
    CHECK(run_cli("frobnicate").code == 1);
    CHECK(run_cli("bench -c /nonexistent/config.json").code == 1);
    const auto dir = temp_dir("cli");
    std::ofstream(dir / "bad.json") << R"({"datasets": []})";
    CHECK(run_cli("bench -c " + (dir / "bad.json").string()).code == 1);
    std::ofstream(dir / "broken.csv") << "not,a\nmatrix\n";
    CHECK(run_cli("ph -i " + (dir / "broken.csv").string()).code == 2);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("generate, distance, ph and score round trip") {
    const auto dir = temp_dir("pipeline");
    const std::string pts = (dir / "pts.csv").string(), dist = (dir / "d.csv").string(),
                      dgm = (dir / "dgm.csv").string();
    REQUIRE(run_cli("generate --manifold circle --n 30 --dim 4 --seed 1 -o " + pts).code == 0);
    REQUIRE(run_cli("distance -i " + pts + " --name eff_res -p k=6 -o " + dist).code == 0);
    REQUIRE(run_cli("ph -i " + dist + " -o " + dgm).code == 0);
    const CliResult score = run_cli("score -d " + dgm + " --dim 1 --m 1");
    CHECK(score.code == 0);
    CHECK(score.out.find("s_1 = ") != std::string::npos);
    CHECK(run_cli("distance -i " + pts + " --name eff_res -p bogus=1 -o " + dist).code != 0);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("ph on the unit square") {
    const auto dir = temp_dir("square");
    std::ofstream(dir / "sq.csv") << "0,1,1.4142135623730951,1\n1,0,1,1.4142135623730951\n"
                                     "1.4142135623730951,1,0,1\n1,1.4142135623730951,1,0\n";
    const CliResult r = run_cli("ph -i " + (dir / "sq.csv").string());
    CHECK(r.code == 0);
    CHECK(r.out.find("1,1,1.4142135623730951") != std::string::npos);
    std::filesystem::remove_all(dir);
  }
}
