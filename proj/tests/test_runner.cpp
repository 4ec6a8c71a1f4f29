#include <filesystem>
#include <fstream>
#include <string>

#include "auxinet/io.hpp"
#include "auxinet/runner.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace auxinet;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("auxinet_test_" + tag);
  fs::remove_all(p);
  return p;
}

json tiny_primary() {
  return {
      {"model", "primary"},
      {"grid", {{"shape", "diamond"}, {"rows", 3}, {"cols", 3},
                {"bbox", {-0.5, -1.5, 2.0, 0.5}}}},
      {"params", {{"kappa", 2.0}, {"gamma", 0.5}}},
      {"sources", json::array({{{"region", {{"kind", "vertices"},
                                            {"ids", {6}}}},
                                {"strength", 10.0}}})},
      {"sinks", json::array({{{"region", {{"kind", "all"}}}, {"strength", 1.0}},
                             {{"region", {{"kind", "vertices"}, {"ids", {6}}}},
                              {"strength", 0.0}}})},
      {"integrator", {{"t_max", 200.0}, {"snapshot_every", 3}}},
      {"analysis", {{"symmetry_axis", "horizontal"}}},
  };
}

std::string slurp(const fs::path& p) {
  REQUIRE(fs::exists(p));
  return read_text_file(p.string());
}

}  // namespace

TEST_CASE("a run writes the full artifact set and passes its own check") {
  const fs::path dir = fresh_dir("run");
  const RunOutcome out = run_config(tiny_primary(), dir.string());
  CHECK(out.exit_code == kExitOk);
  CHECK(out.analysis.value("steady", false));

  for (const char* name :
       {"config_canonical.json", "graph.json", "vertices.csv", "edges.csv",
        "analysis.json", "render.svg"})
    CHECK(fs::exists(dir / name));

  CHECK(check_dir(dir.string()) == kExitOk);

  // The stored analysis agrees with what the outcome reported.
  const json stored = json::parse(slurp(dir / "analysis.json"));
  CHECK(stored["steady"] == out.analysis["steady"]);
  CHECK(stored["ok"] == true);
  fs::remove_all(dir);
}

TEST_CASE("reruns of a seeded config are byte-identical") {
  json cfg = tiny_primary();
  cfg["initial"] = {{"X", {{"kind", "uniform_perturbation"}, {"base", 1.0},
                           {"epsilon", 0.5}}}};
  cfg["seed"] = 77;

  const fs::path d1 = fresh_dir("rerun_a");
  const fs::path d2 = fresh_dir("rerun_b");
  REQUIRE(run_config(cfg, d1.string()).exit_code == kExitOk);
  REQUIRE(run_config(cfg, d2.string()).exit_code == kExitOk);
  for (const char* name :
       {"config_canonical.json", "graph.json", "vertices.csv", "edges.csv",
        "analysis.json", "render.svg"})
    CHECK(slurp(d1 / name) == slurp(d2 / name));
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("config problems exit with the dedicated code") {
  const fs::path dir = fresh_dir("badcfg");

  SUBCASE("unknown keys") {
    json cfg = tiny_primary();
    cfg["grd"] = 1;
    const RunOutcome out = run_config(cfg, dir.string());
    CHECK(out.exit_code == kExitConfig);
    CHECK_FALSE(out.message.empty());
  }

  SUBCASE("missing file") {
    const RunOutcome out =
        run_config_file("/nonexistent/nowhere.json", dir.string());
    CHECK(out.exit_code == kExitConfig);
  }

  SUBCASE("unparseable file") {
    const fs::path bad = fs::temp_directory_path() / "auxinet_bad.json";
    std::ofstream(bad) << "{ not json";
    const RunOutcome out = run_config_file(bad.string(), dir.string());
    CHECK(out.exit_code == kExitConfig);
    fs::remove(bad);
  }

  fs::remove_all(dir);
}

TEST_CASE("sweeps fan out per value and record failures per row") {
  const fs::path root = fresh_dir("sweep");
  json cfg = tiny_primary();
  // Middle value is invalid (negative rate) and must fail its row only.
  const int worst = run_sweep(cfg, "params.delta", {"0.5", "-1", "2"},
                              root.string(), 2);
  CHECK(worst == kExitConfig);

  const std::string summary = slurp(root / "sweep_summary.csv");
  CHECK(summary.find("params.delta,0.5,0") != std::string::npos);
  CHECK(summary.find("params.delta,-1,2") != std::string::npos);
  CHECK(summary.find("params.delta,2,0") != std::string::npos);

  // Successful rows carry full artifact sets.
  CHECK(fs::exists(root / "params.delta=0.5" / "analysis.json"));
  CHECK(fs::exists(root / "params.delta=2" / "analysis.json"));
  fs::remove_all(root);
}

TEST_CASE("sweep row directories sanitize bracketed axis names") {
  const fs::path root = fresh_dir("sweep_names");
  const int worst =
      run_sweep(tiny_primary(), "sources[0].strength", {"5"}, root.string(), 1);
  CHECK(worst == kExitOk);
  CHECK(fs::exists(root / "sources-0-.strength=5" / "analysis.json"));
  fs::remove_all(root);
}

TEST_CASE("dotted path assignment edits nested config values") {
  json cfg = tiny_primary();
  set_config_path(cfg, "params.delta", "2.5");
  CHECK(cfg["params"]["delta"] == 2.5);
  set_config_path(cfg, "sources[0].strength", "42");
  CHECK(cfg["sources"][0]["strength"] == 42.0);
  set_config_path(cfg, "integrator.snapshot_every", "7");
  CHECK(cfg["integrator"]["snapshot_every"] == 7);
  // Non-numeric values fall back to strings.
  set_config_path(cfg, "analysis.symmetry_axis", "vertical");
  CHECK(cfg["analysis"]["symmetry_axis"] == "vertical");
}

TEST_CASE("check flags tampered artifacts") {
  const fs::path dir = fresh_dir("tamper");
  REQUIRE(run_config(tiny_primary(), dir.string()).exit_code == kExitOk);
  REQUIRE(check_dir(dir.string()) == kExitOk);

  // Rescale every stored activity: Murray residuals and the overlap mask
  // no longer match the stored analysis.
  const fs::path edges = dir / "edges.csv";
  std::string text = slurp(edges);
  json stored = json::parse(slurp(dir / "analysis.json"));
  EdgeSeries series = read_edge_series_csv(text);
  for (Eigen::VectorXd& v : series.values) v *= 3.0;
  const Graph g = graph_from_json(json::parse(slurp(dir / "graph.json")));
  std::vector<double> times = series.times;
  write_text_file(edges.string(), edge_series_csv(g, times, series.values, "x"));
  CHECK(check_dir(dir.string()) != kExitOk);
  fs::remove_all(dir);
}
