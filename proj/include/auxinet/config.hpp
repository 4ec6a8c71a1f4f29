#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "auxinet/continuum.hpp"
#include "auxinet/dynamics.hpp"
#include "auxinet/graph.hpp"
#include "auxinet/ode.hpp"
#include "auxinet/rng.hpp"

namespace auxinet {

// Where on the graph (or grid) a source/sink placement applies. Entries are
// applied in order with assignment semantics: later placements overwrite
// earlier ones on the vertices they cover.
enum class RegionKind {
  All,
  HalfPlane,    // axis ('x' or 'y'), op ("le" or "ge"), value
  Disc,         // cx, cy, r
  Vertices,     // explicit id list
  RimNearest,   // boundary vertex nearest to (x, y)
  RimArc,       // walk the boundary from the rim vertex nearest (x, y)
};

struct RegionSpec {
  RegionKind kind = RegionKind::All;
  char axis = 'x';
  std::string op = "le";
  double value = 0.0;
  double cx = 0.0, cy = 0.0, r = 0.0;
  std::vector<int> ids;
  double x = 0.0, y = 0.0;
  // RimArc: arc length along the boundary polygon from the anchor vertex;
  // direction "ccw", "cw" or "both" (the paper places symmetric pairs).
  double distance = 0.0;
  std::string direction = "both";
};

struct Placement {
  RegionSpec region;
  double strength = 0.0;
};

// Initial condition for one field. `epsilon` scales the uniform draw; the
// Bernoulli kind adds the deterministic floor 1e-5 * epsilon so no entry
// starts at exactly zero unless epsilon is zero too.
enum class FieldKind { Constant, UniformPerturbation, Bernoulli, ScaledUniform };

struct FieldSpec {
  FieldKind kind = FieldKind::Constant;
  double value = 1.0;    // Constant
  double base = 1.0;     // UniformPerturbation: base + epsilon U(0,1)
  double epsilon = 0.0;  // perturbation / scaled-uniform / bernoulli jitter
  double p = 0.2;        // Bernoulli success probability

  bool random() const { return kind != FieldKind::Constant; }
};

struct GridSpec {
  GridShape shape = GridShape::Diamond;
  int rows = 9, cols = 9;  // Diamond only
  int resolution = 9;      // lattice points per side for the other shapes
  BBox bbox{-0.5, -1.5, 2.0, 0.5};
};

struct AnalysisSpec {
  std::string symmetry_axis = "none";  // none | vertical | horizontal
  double pattern_threshold = 0.5;      // activity level counting as patterned
  double energy_rtol = 1e-6;           // slack for the dissipation check
};

struct ContinuumSpec {
  int nx = 32, ny = 32;
  BBox bbox{0.0, 0.0, 1.0, 1.0};
  std::string scheme = "elliptic";  // elliptic | parabolic
  double dt = 1e-3;
  double t_max = 1.0;
  double steady_tol = 1e-8;
  int snapshot_every = 10;
  double diffusion2 = 1e-2;
  std::vector<Placement> sources;  // assemble S over cell centers
  std::vector<Placement> sinks;    // assemble I over cell centers
  FieldSpec initial_x;             // applied to both face families
  std::optional<FieldSpec> initial_a;  // parabolic scheme start, optional
  double tol = 1e-10;  // steady minimizer stopping tolerance
  int max_iter = 100;
};

struct OutputSpec {
  bool render = true;
  double stroke_min = 0.5;
  double stroke_max = 6.0;
  int canvas_width = 640;
};

struct RunConfig {
  std::string model = "primary";  // primary|hu_cai|mitchison|continuum|p_laplacian
  std::string note;               // free-form, carried through but unused
  GridSpec grid;
  ModelParams params;  // scalar fields only; S/I are assembled per run
  std::vector<Placement> sources;
  std::vector<Placement> sinks;
  FieldSpec initial_a;
  FieldSpec initial_x;
  std::optional<uint64_t> seed;
  IntegratorConfig integrator;
  AnalysisSpec analysis;
  ContinuumSpec continuum;
  OutputSpec output;

  bool is_continuum_model() const {
    return model == "continuum" || model == "p_laplacian";
  }
};

// Strict parsing: unknown keys anywhere raise ConfigError naming the key and
// its path. parse_config_file additionally annotates JSON syntax errors with
// nlohmann's byte position.
RunConfig parse_config(const nlohmann::json& j);
RunConfig parse_config_file(const std::string& path);

// Canonical form: every default materialized, keys in sorted order, only the
// blocks relevant to the chosen model present. parse(config_to_json(c))
// reproduces c exactly.
nlohmann::json config_to_json(const RunConfig& c);

// Checks cross-field rules that parsing alone cannot see (seed required for
// random ICs, region kinds valid for the target, model-specific blocks).
void validate_config(const RunConfig& c);

// Region evaluation. Rim kinds need the lattice metadata that the grid
// builders attach; arbitrary graphs without it raise ConfigError.
std::vector<int> region_vertices(const Graph& g, const RegionSpec& r);
std::vector<int> region_cells(const ContinuumGrid& grid, const RegionSpec& r);

// Applies placements in order onto a vector initialized with default_value.
Eigen::VectorXd assemble_vertex_field(const Graph& g,
                                      const std::vector<Placement>& placements,
                                      double default_value);
Eigen::VectorXd assemble_cell_field(const ContinuumGrid& grid,
                                    const std::vector<Placement>& placements,
                                    double default_value);

// Draws n values in index order; deterministic for a given rng state.
Eigen::VectorXd sample_field(const FieldSpec& f, Eigen::Index n, Rng& rng);

Graph build_grid(const GridSpec& spec);

}  // namespace auxinet
