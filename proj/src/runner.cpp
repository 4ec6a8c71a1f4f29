#include "auxinet/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <thread>

#include "auxinet/analysis.hpp"
#include "auxinet/continuum.hpp"
#include "auxinet/errors.hpp"
#include "auxinet/io.hpp"
#include "auxinet/render.hpp"
#include "auxinet/systems.hpp"

namespace auxinet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_json(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

json stats_to_json(const IntegrationStats& s) {
  json j;
  j["steps"] = s.steps;
  j["rejected"] = s.rejected;
  j["rhs_evals"] = s.rhs_evals;
  j["jacobians"] = s.jacobians;
  j["factorizations"] = s.factorizations;
  return j;
}

// Sources are assigned positively; sink placements overwrite with the
// negated strength, matching the convention that a sink of strength s
// withdraws s units of flow.
Eigen::VectorXd assemble_signed_injections(const Graph& g,
                                           const RunConfig& c) {
  Eigen::VectorXd S = assemble_vertex_field(g, c.sources, 0.0);
  for (const Placement& pl : c.sinks) {
    for (int v : region_vertices(g, pl.region)) S[v] = -pl.strength;
  }
  return S;
}

ReflectionAxis axis_from_name(const std::string& name) {
  return name == "vertical" ? ReflectionAxis::VerticalMidline
                            : ReflectionAxis::HorizontalMidline;
}

struct NetworkArtifacts {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> vertex_values;
  std::vector<Eigen::VectorXd> edge_values;
  NetworkState final_state;
};

void write_network_artifacts(const std::string& out_dir, const Graph& g,
                             const RunConfig& c, const NetworkArtifacts& art,
                             const char* vertex_name, const char* edge_name,
                             const json& analysis) {
  write_json(out_dir + "/graph.json", graph_to_json(g));
  write_text_file(out_dir + "/vertices.csv",
                  vertex_series_csv(art.times, art.vertex_values, vertex_name));
  write_text_file(out_dir + "/edges.csv",
                  edge_series_csv(g, art.times, art.edge_values, edge_name));
  write_json(out_dir + "/analysis.json", analysis);
  if (c.output.render) {
    RenderOptions opts;
    opts.canvas_width = c.output.canvas_width;
    opts.stroke_min = c.output.stroke_min;
    opts.stroke_max = c.output.stroke_max;
    write_text_file(out_dir + "/render.svg",
                    render_svg(g, art.final_state, opts));
  }
}

// Drift budget for conserved linear quantities: per-step error control plus
// a random-walk roundoff allowance across the accepted steps.
double conservation_tolerance(const IntegratorConfig& cfg, double total0,
                              int n, long steps) {
  return 10.0 * (cfg.rtol * std::max(1.0, std::abs(total0)) + cfg.atol * n) *
         std::sqrt(static_cast<double>(steps) + 1.0);
}

RunOutcome run_primary(const RunConfig& c, const std::string& out_dir) {
  Graph g = build_grid(c.grid);
  ModelParams p = c.params;
  p.S = assemble_vertex_field(g, c.sources, 0.0);
  p.I = assemble_vertex_field(g, c.sinks, 0.0);

  const uint64_t seed = c.seed.value_or(0);
  Rng rng_a(seed, "ic.a"), rng_x(seed, "ic.X");
  const Eigen::VectorXd a0 = sample_field(c.initial_a, g.vertex_count(), rng_a);
  const Eigen::VectorXd x0 = sample_field(c.initial_x, g.edge_count(), rng_x);

  PrimarySystem sys(g, p);
  SimulationResult run = integrate(sys, 0.0, sys.pack(a0, x0), c.integrator);

  NetworkArtifacts art;
  art.times = run.times;
  for (size_t k = 0; k < run.times.size(); ++k) {
    NetworkState st = sys.unpack(run.times[k], run.states[k]);
    art.vertex_values.push_back(st.a);
    art.edge_values.push_back(st.X);
    if (k + 1 == run.times.size()) art.final_state = std::move(st);
  }

  const BoundReport bounds = check_bounds(g, p, run);
  const MurrayReport murray =
      murray_residual(g, p, art.final_state, run.steady);

  json analysis;
  analysis["model"] = c.model;
  analysis["steady"] = run.steady;
  if (run.steady) analysis["steady_time"] = run.steady_time;
  analysis["final_time"] = run.times.back();
  analysis["stats"] = stats_to_json(run.stats);
  analysis["warnings"] = run.warnings;
  analysis["events"] = run.events;
  analysis["bounds"] = bounds.to_json();
  analysis["murray"] = murray.to_json();
  analysis["pattern_extent"] =
      pattern_extent(art.final_state, c.analysis.pattern_threshold);
  analysis["pattern_threshold"] = c.analysis.pattern_threshold;
  analysis["high_region_jaccard"] = high_region_overlap(g, art.final_state);
  if (c.analysis.symmetry_axis != "none") {
    analysis["symmetry_axis"] = c.analysis.symmetry_axis;
    analysis["symmetry_error"] = symmetry_error(
        g, art.final_state, axis_from_name(c.analysis.symmetry_axis));
  }

  RunOutcome out;
  if (!bounds.pass()) {
    out.exit_code = kExitInvariant;
    out.message = "invariant violation: " + bounds.violations.front();
  } else {
    out.message = run.steady
                      ? "steady at t=" + format_double(run.steady_time)
                      : "stopped at t_max=" + format_double(run.times.back());
  }
  analysis["ok"] = out.exit_code == kExitOk;
  out.analysis = analysis;
  write_network_artifacts(out_dir, g, c, art, "a", "x", analysis);
  return out;
}

RunOutcome run_hu_cai(const RunConfig& c, const std::string& out_dir) {
  Graph g = build_grid(c.grid);
  ModelParams p = c.params;
  p.S = assemble_signed_injections(g, c);

  const uint64_t seed = c.seed.value_or(0);
  Rng rng_x(seed, "ic.X");
  const Eigen::VectorXd c0 = sample_field(c.initial_x, g.edge_count(), rng_x);

  HuCaiSystem sys(g, p);
  SimulationResult run = integrate(sys, 0.0, c0, c.integrator);

  NetworkArtifacts art;
  art.times = run.times;
  for (size_t k = 0; k < run.times.size(); ++k) {
    NetworkState st = sys.unpack(run.times[k], run.states[k]);
    art.vertex_values.push_back(st.a);
    art.edge_values.push_back(st.X);
    if (k + 1 == run.times.size()) art.final_state = std::move(st);
  }

  const EnergyReport energy =
      energy_dissipation(g, p, run, c.analysis.energy_rtol);
  const double residual_bound = 1e-10 * p.S.norm();
  const bool kirchhoff_ok = sys.max_solve_residual() <= residual_bound;

  json analysis;
  analysis["model"] = c.model;
  analysis["steady"] = run.steady;
  if (run.steady) analysis["steady_time"] = run.steady_time;
  analysis["final_time"] = run.times.back();
  analysis["stats"] = stats_to_json(run.stats);
  analysis["warnings"] = run.warnings;
  analysis["events"] = run.events;
  analysis["energy"] = energy.to_json();
  analysis["kirchhoff_max_residual"] = sys.max_solve_residual();
  analysis["kirchhoff_residual_bound"] = residual_bound;
  analysis["kirchhoff_ok"] = kirchhoff_ok;

  RunOutcome out;
  if (!energy.monotone) {
    out.exit_code = kExitInvariant;
    out.message = "invariant violation: energy increased by " +
                  format_double(energy.max_increase);
  } else if (!kirchhoff_ok) {
    out.exit_code = kExitInvariant;
    out.message = "invariant violation: pressure solve residual " +
                  format_double(sys.max_solve_residual()) + " above bound";
  } else {
    out.message = run.steady
                      ? "steady at t=" + format_double(run.steady_time)
                      : "stopped at t_max=" + format_double(run.times.back());
  }
  analysis["ok"] = out.exit_code == kExitOk;
  out.analysis = analysis;
  write_network_artifacts(out_dir, g, c, art, "pressure", "conductivity",
                          analysis);
  return out;
}

RunOutcome run_mitchison(const RunConfig& c, const std::string& out_dir) {
  Graph g = build_grid(c.grid);
  ModelParams p = c.params;
  p.S = assemble_signed_injections(g, c);

  const uint64_t seed = c.seed.value_or(0);
  Rng rng_s(seed, "ic.a"), rng_d(seed, "ic.X");
  const Eigen::VectorXd s0 = sample_field(c.initial_a, g.vertex_count(), rng_s);
  const Eigen::VectorXd d0 = sample_field(c.initial_x, g.edge_count(), rng_d);

  MitchisonSystem sys(g, p);
  SimulationResult run = integrate(sys, 0.0, sys.pack(s0, d0), c.integrator);

  NetworkArtifacts art;
  art.times = run.times;
  for (size_t k = 0; k < run.times.size(); ++k) {
    NetworkState st = sys.unpack(run.times[k], run.states[k]);
    art.vertex_values.push_back(st.a);
    art.edge_values.push_back(st.X);
    if (k + 1 == run.times.size()) art.final_state = std::move(st);
  }

  // Total signal is conserved exactly when the injections balance; audit the
  // drift across all snapshots against the integrator's error budget.
  const double injection_total = p.S.sum();
  const bool balanced =
      std::abs(injection_total) <= 1e-12 * p.S.cwiseAbs().sum();
  const double total0 = art.vertex_values.front().sum();
  double max_drift = 0.0;
  for (const Eigen::VectorXd& s : art.vertex_values) {
    max_drift = std::max(max_drift, std::abs(s.sum() - total0));
  }
  const double tol = conservation_tolerance(c.integrator, total0,
                                            g.vertex_count(), run.stats.steps);

  json analysis;
  analysis["model"] = c.model;
  analysis["steady"] = run.steady;
  if (run.steady) analysis["steady_time"] = run.steady_time;
  analysis["final_time"] = run.times.back();
  analysis["stats"] = stats_to_json(run.stats);
  analysis["warnings"] = run.warnings;
  analysis["events"] = run.events;
  analysis["conservation"] = {{"balanced", balanced},
                              {"initial_total", total0},
                              {"max_drift", max_drift},
                              {"tolerance", tol},
                              {"pass", !balanced || max_drift <= tol}};

  RunOutcome out;
  if (balanced && max_drift > tol) {
    out.exit_code = kExitInvariant;
    out.message = "invariant violation: total signal drifted by " +
                  format_double(max_drift);
  } else {
    out.message = run.steady
                      ? "steady at t=" + format_double(run.steady_time)
                      : "stopped at t_max=" + format_double(run.times.back());
  }
  analysis["ok"] = out.exit_code == kExitOk;
  out.analysis = analysis;
  write_network_artifacts(out_dir, g, c, art, "s", "d", analysis);
  return out;
}

json grid_meta_json(const ContinuumGrid& grid) {
  json j;
  j["nx"] = grid.nx;
  j["ny"] = grid.ny;
  j["bbox"] =
      json::array({grid.bbox.xmin, grid.bbox.ymin, grid.bbox.xmax,
                   grid.bbox.ymax});
  return j;
}

ContinuumParams continuum_params(const RunConfig& c,
                                 const ContinuumGrid& grid) {
  ContinuumParams cp;
  cp.delta = c.params.delta;
  cp.kappa = c.params.kappa;
  cp.gamma = c.params.gamma;
  cp.tau = c.params.tau;
  cp.diffusion2 = c.continuum.diffusion2;
  cp.S = assemble_cell_field(grid, c.continuum.sources, 0.0);
  cp.I = assemble_cell_field(grid, c.continuum.sinks, 0.0);
  return cp;
}

RunOutcome run_continuum_model(const RunConfig& c, const std::string& out_dir) {
  const ContinuumSpec& spec = c.continuum;
  ContinuumGrid grid{spec.nx, spec.ny, spec.bbox};
  const ContinuumParams cp = continuum_params(c, grid);

  const uint64_t seed = c.seed.value_or(0);
  Rng rng_x1(seed, "ic.X1"), rng_x2(seed, "ic.X2");
  const Eigen::VectorXd x1_0 =
      sample_field(spec.initial_x, grid.xfaces(), rng_x1);
  const Eigen::VectorXd x2_0 =
      sample_field(spec.initial_x, grid.yfaces(), rng_x2);
  Eigen::VectorXd a0;
  const Eigen::VectorXd* a0_ptr = nullptr;
  if (spec.initial_a) {
    Rng rng_a(seed, "ic.a");
    a0 = sample_field(*spec.initial_a, grid.cells(), rng_a);
    a0_ptr = &a0;
  }

  const ContinuumScheme scheme = spec.scheme == "parabolic"
                                     ? ContinuumScheme::ParabolicParabolic
                                     : ContinuumScheme::EllipticParabolic;
  ContinuumResult res =
      run_continuum(grid, cp, x1_0, x2_0, spec.dt, spec.t_max, scheme,
                    spec.steady_tol, spec.snapshot_every, a0_ptr);

  // Positivity floor: the implicit decay/diffusion step keeps every face at
  // or above min(X0) e^{-tau t}; the extra 1e-6 t absorbs roundoff.
  const double x0_min = std::min(x1_0.minCoeff(), x2_0.minCoeff());
  double worst_margin = std::numeric_limits<double>::infinity();
  std::string series = "t,min_x,max_x,mean_x,min_a,max_a\n";
  for (size_t k = 0; k < res.times.size(); ++k) {
    const ContinuumField& f = res.snapshots[k];
    const double t = res.times[k];
    const double min_x = std::min(f.X1.minCoeff(), f.X2.minCoeff());
    const double max_x = std::max(f.X1.maxCoeff(), f.X2.maxCoeff());
    const double mean_x =
        (f.X1.sum() + f.X2.sum()) / (f.X1.size() + f.X2.size());
    series += format_double(t);
    series += ',';
    series += format_double(min_x);
    series += ',';
    series += format_double(max_x);
    series += ',';
    series += format_double(mean_x);
    series += ',';
    series += format_double(f.a.minCoeff());
    series += ',';
    series += format_double(f.a.maxCoeff());
    series += '\n';
    const double floor = x0_min * std::exp(-cp.tau * t) - 1e-6 * t;
    worst_margin = std::min(worst_margin, min_x - floor);
  }

  json analysis;
  analysis["model"] = c.model;
  analysis["scheme"] = spec.scheme;
  analysis["steady"] = res.steady;
  if (res.steady) analysis["steady_time"] = res.steady_time;
  analysis["final_time"] = res.times.back();
  analysis["snapshot_count"] = res.times.size();
  analysis["warnings"] = res.warnings;
  analysis["floor"] = {{"initial_min", x0_min},
                       {"worst_margin", worst_margin},
                       {"pass", worst_margin >= 0.0}};

  RunOutcome out;
  if (worst_margin < 0.0) {
    out.exit_code = kExitInvariant;
    out.message = "invariant violation: activity fell below the decay floor";
  } else {
    out.message = res.steady
                      ? "steady at t=" + format_double(res.steady_time)
                      : "stopped at t_max=" + format_double(res.times.back());
  }
  analysis["ok"] = out.exit_code == kExitOk;
  out.analysis = analysis;

  write_json(out_dir + "/grid.json", grid_meta_json(grid));
  write_text_file(out_dir + "/series.csv", series);
  write_text_file(out_dir + "/state_final.csv",
                  continuum_field_csv(res.snapshots.back()));
  write_json(out_dir + "/analysis.json", analysis);
  return out;
}

RunOutcome run_p_laplacian(const RunConfig& c, const std::string& out_dir) {
  const ContinuumSpec& spec = c.continuum;
  ContinuumGrid grid{spec.nx, spec.ny, spec.bbox};
  const ContinuumParams cp = continuum_params(c, grid);

  PLaplacianResult res = p_laplacian_steady(grid, cp, spec.tol, spec.max_iter);

  bool descent = true;
  for (size_t k = 1; k < res.objective.size(); ++k) {
    if (res.objective[k] > res.objective[k - 1]) descent = false;
  }

  json analysis;
  analysis["model"] = c.model;
  analysis["converged"] = res.converged;
  analysis["iterations"] = res.iterations;
  analysis["objective"] = res.objective;
  analysis["grad_norm"] = res.grad_norm;
  analysis["descent_monotone"] = descent;
  analysis["warnings"] = res.warnings;

  RunOutcome out;
  if (!descent) {
    out.exit_code = kExitInvariant;
    out.message = "invariant violation: objective increased during descent";
  } else if (!res.converged) {
    out.exit_code = kExitRuntime;
    out.message = "steady minimizer did not converge in " +
                  std::to_string(spec.max_iter) + " iterations";
  } else {
    out.message =
        "converged in " + std::to_string(res.iterations) + " iterations";
  }
  analysis["ok"] = out.exit_code == kExitOk;
  out.analysis = analysis;

  write_json(out_dir + "/grid.json", grid_meta_json(grid));
  write_text_file(
      out_dir + "/state_final.csv",
      continuum_field_csv(ContinuumField{grid, res.a, res.X1, res.X2}));
  write_json(out_dir + "/analysis.json", analysis);
  return out;
}

std::string sanitize_component(const std::string& s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
    out += ok ? c : '-';
  }
  return out;
}

}  // namespace

RunOutcome run_config(const RunConfig& c, const std::string& out_dir) {
  RunOutcome out;
  try {
    validate_config(c);
    fs::create_directories(out_dir);
    write_json(out_dir + "/config_canonical.json", config_to_json(c));
    if (c.model == "primary") return run_primary(c, out_dir);
    if (c.model == "hu_cai") return run_hu_cai(c, out_dir);
    if (c.model == "mitchison") return run_mitchison(c, out_dir);
    if (c.model == "continuum") return run_continuum_model(c, out_dir);
    return run_p_laplacian(c, out_dir);
  } catch (const InvariantViolation& e) {
    out.exit_code = kExitInvariant;
    out.message = e.what();
  } catch (const std::invalid_argument& e) {
    out.exit_code = kExitConfig;
    out.message = e.what();
  } catch (const std::exception& e) {
    out.exit_code = kExitRuntime;
    out.message = e.what();
  }
  return out;
}

RunOutcome run_config(const nlohmann::json& doc, const std::string& out_dir) {
  RunConfig c;
  try {
    c = parse_config(doc);
  } catch (const std::exception& e) {
    return RunOutcome{kExitConfig, e.what(), {}};
  }
  return run_config(c, out_dir);
}

RunOutcome run_config_file(const std::string& config_path,
                           const std::string& out_dir) {
  RunConfig c;
  try {
    c = parse_config_file(config_path);
  } catch (const std::exception& e) {
    return RunOutcome{kExitConfig, e.what(), {}};
  }
  return run_config(c, out_dir);
}

void set_config_path(nlohmann::json& doc, const std::string& dotted,
                     const std::string& value) {
  if (dotted.empty()) throw ConfigError("sweep axis path is empty");
  json* cur = &doc;
  std::string token;
  std::vector<std::string> tokens;
  for (char ch : dotted) {
    if (ch == '.') {
      tokens.push_back(token);
      token.clear();
    } else {
      token += ch;
    }
  }
  tokens.push_back(token);
  for (size_t k = 0; k < tokens.size(); ++k) {
    std::string name = tokens[k];
    long index = -1;
    const size_t lb = name.find('[');
    if (lb != std::string::npos) {
      if (name.back() != ']') {
        throw ConfigError("bad sweep axis segment '" + tokens[k] + "'");
      }
      const std::string idx = name.substr(lb + 1, name.size() - lb - 2);
      name = name.substr(0, lb);
      try {
        index = std::stol(idx);
      } catch (...) {
        throw ConfigError("bad array index in sweep axis '" + tokens[k] + "'");
      }
      if (index < 0) {
        throw ConfigError("negative array index in sweep axis");
      }
    }
    if (name.empty()) {
      throw ConfigError("empty segment in sweep axis '" + dotted + "'");
    }
    cur = &(*cur)[name];
    if (index >= 0) cur = &(*cur)[static_cast<size_t>(index)];
    if (k + 1 == tokens.size()) {
      json parsed = json::parse(value, nullptr, false);
      *cur = parsed.is_discarded() ? json(value) : parsed;
    }
  }
}

int run_sweep(const nlohmann::json& base_doc, const std::string& axis,
              const std::vector<std::string>& values,
              const std::string& out_root, int jobs) {
  if (values.empty()) {
    std::cerr << "sweep: no axis values given\n";
    return kExitConfig;
  }
  fs::create_directories(out_root);

  struct Row {
    std::string value;
    int exit_code = kExitRuntime;
    std::string message;
    json analysis;
  };
  std::vector<Row> rows(values.size());

  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const size_t k = next.fetch_add(1);
      if (k >= values.size()) return;
      Row& row = rows[k];
      row.value = values[k];
      const std::string dir =
          out_root + "/" + sanitize_component(axis) + "=" +
          sanitize_component(values[k]);
      try {
        json doc = base_doc;
        set_config_path(doc, axis, values[k]);
        const RunConfig cfg = parse_config(doc);
        const RunOutcome out = run_config(cfg, dir);
        row.exit_code = out.exit_code;
        row.message = out.message;
        row.analysis = out.analysis;
      } catch (const std::invalid_argument& e) {
        row.exit_code = kExitConfig;
        row.message = e.what();
      } catch (const json::exception& e) {
        row.exit_code = kExitConfig;
        row.message = e.what();
      } catch (const std::exception& e) {
        row.exit_code = kExitRuntime;
        row.message = e.what();
      }
    }
  };
  const int n_threads = std::max(
      1, std::min<int>(jobs, static_cast<int>(values.size())));
  std::vector<std::thread> pool;
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  // One row per value, deterministic order and formatting. Messages drop
  // commas so the CSV stays single-field.
  std::string csv =
      "axis,value,exit_code,steady,steady_time,pattern_extent,"
      "murray_max_relative,message\n";
  int worst = kExitOk;
  for (const Row& row : rows) {
    worst = std::max(worst, row.exit_code);
    csv += axis;
    csv += ',';
    csv += row.value;
    csv += ',';
    csv += std::to_string(row.exit_code);
    csv += ',';
    const json& a = row.analysis;
    const bool have = a.is_object();
    csv += (have && a.value("steady", false)) ? "1" : "0";
    csv += ',';
    if (have && a.contains("steady_time")) {
      csv += format_double(a["steady_time"].get<double>());
    }
    csv += ',';
    if (have && a.contains("pattern_extent")) {
      csv += std::to_string(a["pattern_extent"].get<long>());
    }
    csv += ',';
    if (have && a.contains("murray") && a["murray"].contains("max_relative")) {
      csv += format_double(a["murray"]["max_relative"].get<double>());
    }
    csv += ',';
    std::string msg = row.message;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    csv += msg;
    csv += '\n';
  }
  write_text_file(out_root + "/sweep_summary.csv", csv);
  return worst;
}

namespace {

// Rebuilds a packed trajectory [vertex values; edge values] so the bound
// audit can run on stored artifacts exactly as it does on a live run.
SimulationResult rebuild_run(const VertexSeries& vs, const EdgeSeries& es,
                             bool pack_edges_only) {
  SimulationResult run;
  if (vs.times != es.times) {
    throw ConfigError("stored vertex and edge series disagree on times");
  }
  run.times = vs.times;
  for (size_t k = 0; k < vs.times.size(); ++k) {
    if (pack_edges_only) {
      run.states.push_back(es.values[k]);
    } else {
      Eigen::VectorXd y(vs.values[k].size() + es.values[k].size());
      y << vs.values[k], es.values[k];
      run.states.push_back(std::move(y));
    }
  }
  return run;
}

bool close(double a, double b, double rtol) {
  return std::abs(a - b) <= rtol * std::max({std::abs(a), std::abs(b), 1.0});
}

}  // namespace

int check_dir(const std::string& result_dir) {
  try {
    const json stored =
        json::parse(read_text_file(result_dir + "/analysis.json"));
    const RunConfig cfg =
        parse_config(json::parse(
            read_text_file(result_dir + "/config_canonical.json")));
    const std::string model = stored.value("model", "");
    int failures = 0;
    auto report = [&](const std::string& name, bool ok,
                      const std::string& detail) {
      std::cout << (ok ? "ok   " : "FAIL ") << name
                << (detail.empty() ? "" : " (" + detail + ")") << "\n";
      if (!ok) ++failures;
    };

    if (model == "continuum" || model == "p_laplacian") {
      const json meta = json::parse(read_text_file(result_dir + "/grid.json"));
      const auto& bb = meta.at("bbox");
      const ContinuumField field = read_continuum_field_csv(
          read_text_file(result_dir + "/state_final.csv"),
          meta.at("nx").get<int>(), meta.at("ny").get<int>(),
          BBox{bb[0].get<double>(), bb[1].get<double>(), bb[2].get<double>(),
               bb[3].get<double>()});
      if (model == "continuum") {
        // Only the final snapshot is stored; re-verify the decay floor there.
        const double t_final = stored.at("final_time").get<double>();
        const double x0_min = stored.at("floor").at("initial_min").get<double>();
        const double floor =
            x0_min * std::exp(-cfg.params.tau * t_final) - 1e-6 * t_final;
        const double min_x =
            std::min(field.X1.minCoeff(), field.X2.minCoeff());
        report("decay floor at final state", min_x >= floor,
               "min=" + format_double(min_x) +
                   " floor=" + format_double(floor));
        report("stored floor verdict", stored.at("floor").at("pass").get<bool>(),
               "");
      } else {
        bool descent = true;
        const auto& obj = stored.at("objective");
        for (size_t k = 1; k < obj.size(); ++k) {
          if (obj[k].get<double>() > obj[k - 1].get<double>()) descent = false;
        }
        report("objective non-increasing", descent, "");
        report("converged", stored.at("converged").get<bool>(), "");
      }
      return failures == 0 ? kExitOk : kExitInvariant;
    }

    const Graph g = graph_from_json(
        json::parse(read_text_file(result_dir + "/graph.json")));
    const VertexSeries vs =
        read_vertex_series_csv(read_text_file(result_dir + "/vertices.csv"));
    const EdgeSeries es =
        read_edge_series_csv(read_text_file(result_dir + "/edges.csv"));
    NetworkState final_state;
    final_state.t = vs.times.back();
    final_state.a = vs.values.back();
    final_state.X = es.values.back();

    if (model == "primary") {
      ModelParams p = cfg.params;
      p.S = assemble_vertex_field(g, cfg.sources, 0.0);
      p.I = assemble_vertex_field(g, cfg.sinks, 0.0);
      const SimulationResult run = rebuild_run(vs, es, false);
      const BoundReport bounds = check_bounds(g, p, run);
      report("trajectory bounds", bounds.pass(),
             bounds.pass() ? "" : bounds.violations.front());
      const MurrayReport murray = murray_residual(
          g, p, final_state, stored.value("steady", false));
      const double stored_murray =
          stored.at("murray").at("max_relative").get<double>();
      report("branching law residual matches",
             close(murray.max_relative, stored_murray, 1e-9),
             format_double(murray.max_relative) + " vs " +
                 format_double(stored_murray));
      const int extent =
          pattern_extent(final_state, cfg.analysis.pattern_threshold);
      report("pattern extent matches",
             extent == stored.at("pattern_extent").get<int>(),
             std::to_string(extent));
      if (stored.contains("symmetry_error")) {
        const double sym = symmetry_error(
            g, final_state, axis_from_name(cfg.analysis.symmetry_axis));
        report("symmetry error matches",
               close(sym, stored.at("symmetry_error").get<double>(), 1e-9),
               format_double(sym));
      }
    } else if (model == "hu_cai") {
      ModelParams p = cfg.params;
      p.S = assemble_signed_injections(g, cfg);
      const SimulationResult run = rebuild_run(vs, es, true);
      const EnergyReport energy =
          energy_dissipation(g, p, run, cfg.analysis.energy_rtol);
      report("energy non-increasing", energy.monotone,
             "max increase " + format_double(energy.max_increase));
      report("stored solve residual within bound",
             stored.at("kirchhoff_ok").get<bool>(), "");
    } else if (model == "mitchison") {
      const double total0 = vs.values.front().sum();
      double max_drift = 0.0;
      for (const auto& s : vs.values) {
        max_drift = std::max(max_drift, std::abs(s.sum() - total0));
      }
      const double tol =
          stored.at("conservation").at("tolerance").get<double>();
      const bool balanced =
          stored.at("conservation").at("balanced").get<bool>();
      report("total signal conserved", !balanced || max_drift <= tol,
             "drift " + format_double(max_drift));
    } else {
      report("known model", false, model);
    }
    return failures == 0 ? kExitOk : kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "check: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace auxinet
