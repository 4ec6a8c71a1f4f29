// Command-line front end: run one config, sweep a parameter axis, render a
// stored state, or re-check a result directory.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include "json.hpp"

#include "auxinet/config.hpp"
#include "auxinet/errors.hpp"
#include "auxinet/io.hpp"
#include "auxinet/render.hpp"
#include "auxinet/runner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Default output root: $AUXINET_OUT if set, else ./runs.
std::string output_root() {
  const char* env = std::getenv("AUXINET_OUT");
  return env && *env ? env : "runs";
}

std::string stem_of(const std::string& path) {
  return fs::path(path).stem().string();
}

// "k=v1,v2,v3" -> axis name + value strings.
bool split_axis(const std::string& spec, std::string& axis,
                std::vector<std::string>& values) {
  const size_t eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
    return false;
  }
  axis = spec.substr(0, eq);
  std::string cur;
  for (char c : spec.substr(eq + 1)) {
    if (c == ',') {
      values.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  values.push_back(cur);
  for (const std::string& v : values) {
    if (v.empty()) return false;
  }
  return true;
}

int cmd_run(const std::string& config_path, std::string out_dir) {
  if (out_dir.empty()) {
    out_dir = output_root() + "/" + stem_of(config_path);
  }
  const auxinet::RunOutcome out =
      auxinet::run_config_file(config_path, out_dir);
  if (out.exit_code == auxinet::kExitOk) {
    std::cout << out.message << "\n" << "artifacts: " << out_dir << "\n";
  } else {
    std::cerr << "run failed (exit " << out.exit_code << "): " << out.message
              << "\n";
  }
  return out.exit_code;
}

int cmd_sweep(const std::string& config_path, const std::string& axis_spec,
              std::string out_root, int jobs) {
  std::string axis;
  std::vector<std::string> values;
  if (!split_axis(axis_spec, axis, values)) {
    std::cerr << "sweep: --axis must look like params.delta=0.1,0.5,2\n";
    return auxinet::kExitConfig;
  }
  json doc;
  try {
    doc = json::parse(auxinet::read_text_file(config_path));
  } catch (const std::exception& e) {
    std::cerr << "sweep: " << e.what() << "\n";
    return auxinet::kExitConfig;
  }
  if (out_root.empty()) {
    out_root = output_root() + "/" + stem_of(config_path) + "_sweep";
  }
  const int code = auxinet::run_sweep(doc, axis, values, out_root, jobs);
  std::cout << "summary: " << out_root << "/sweep_summary.csv\n";
  return code;
}

int cmd_render(const std::string& edges_csv, const std::string& graph_json,
               std::string vertices_csv, double at_time, std::string out_path) {
  try {
    const auxinet::Graph g = auxinet::graph_from_json(
        json::parse(auxinet::read_text_file(graph_json)));
    const auxinet::EdgeSeries es =
        auxinet::read_edge_series_csv(auxinet::read_text_file(edges_csv));

    // Default to the sibling vertex file when present so concentrations are
    // colored without extra flags.
    if (vertices_csv.empty()) {
      const fs::path sibling = fs::path(edges_csv).parent_path() /
                               "vertices.csv";
      if (fs::exists(sibling)) vertices_csv = sibling.string();
    }

    // Pick the snapshot closest to the requested time (default: the last).
    size_t pick = es.times.size() - 1;
    if (std::isfinite(at_time)) {
      double best = std::numeric_limits<double>::infinity();
      for (size_t k = 0; k < es.times.size(); ++k) {
        const double err = std::abs(es.times[k] - at_time);
        if (err < best) {
          best = err;
          pick = k;
        }
      }
    }

    auxinet::NetworkState st;
    st.t = es.times[pick];
    st.X = es.values[pick];
    if (!vertices_csv.empty()) {
      const auxinet::VertexSeries vs = auxinet::read_vertex_series_csv(
          auxinet::read_text_file(vertices_csv));
      if (vs.times != es.times) {
        throw auxinet::ConfigError(
            "vertex and edge series disagree on snapshot times");
      }
      st.a = vs.values[pick];
    }

    if (out_path.empty()) {
      out_path = (fs::path(edges_csv).parent_path() / "render.svg").string();
    }
    auxinet::write_text_file(out_path, auxinet::render_svg(g, st));
    std::cout << "wrote " << out_path << " (t=" << auxinet::format_double(st.t)
              << ")\n";
    return auxinet::kExitOk;
  } catch (const std::invalid_argument& e) {
    std::cerr << "render: " << e.what() << "\n";
    return auxinet::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "render: " << e.what() << "\n";
    return auxinet::kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive transport network simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, axis_spec, vertices_csv, edges_csv,
      graph_json, result_dir, out_path;
  double at_time = std::numeric_limits<double>::quiet_NaN();
  int jobs = 4;

  CLI::App* run = app.add_subcommand("run", "run one config file");
  run->add_option("config", config_path, "JSON config")->required();
  run->add_option("-o,--out", out_dir, "output directory");

  CLI::App* sweep =
      app.add_subcommand("sweep", "run a config once per axis value");
  sweep->add_option("config", config_path, "JSON config template")->required();
  sweep->add_option("--axis", axis_spec, "dotted.path=v1,v2,...")->required();
  sweep->add_option("-o,--out", out_dir, "output root directory");
  sweep->add_option("-j,--jobs", jobs, "parallel runs")
      ->check(CLI::Range(1, 64));

  CLI::App* render = app.add_subcommand("render", "render a stored state");
  render->add_option("edges", edges_csv, "edges.csv from a run")->required();
  render->add_option("graph", graph_json, "graph.json from the same run")
      ->required();
  render->add_option("--vertices-csv", vertices_csv,
                     "vertex series (default: sibling vertices.csv)");
  render->add_option("--time", at_time, "snapshot time (default: last)");
  render->add_option("-o,--out", out_path, "output SVG path");

  CLI::App* check = app.add_subcommand("check", "re-derive analysis");
  check->add_option("dir", result_dir, "result directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(config_path, out_dir);
  if (sweep->parsed()) return cmd_sweep(config_path, axis_spec, out_dir, jobs);
  if (render->parsed()) {
    return cmd_render(edges_csv, graph_json, vertices_csv, at_time, out_path);
  }
  return auxinet::check_dir(result_dir);
}
