#include "auxinet/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "auxinet/errors.hpp"

namespace auxinet {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError("config: " + (path.empty() ? msg : path + ": " + msg));
}

void need_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

// Strict schema: every key must be in the allowed list for its block.
void check_keys(const json& j, const std::string& path,
                const std::vector<std::string>& allowed) {
  need_object(j, path);
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) ==
        allowed.end()) {
      fail(path, "unknown key '" + item.key() + "'");
    }
  }
}

double get_double(const json& j, const std::string& path, const char* key,
                  double def) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_number()) fail(join(path, key), "expected a number");
  return v.get<double>();
}

double need_double(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) fail(path, std::string("missing key '") + key + "'");
  return get_double(j, path, key, 0.0);
}

int get_int(const json& j, const std::string& path, const char* key, int def) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_number_integer()) fail(join(path, key), "expected an integer");
  return v.get<int>();
}

bool get_bool(const json& j, const std::string& path, const char* key,
              bool def) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_boolean()) fail(join(path, key), "expected a boolean");
  return v.get<bool>();
}

std::string get_string(const json& j, const std::string& path, const char* key,
                       const std::string& def) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_string()) fail(join(path, key), "expected a string");
  return v.get<std::string>();
}

BBox get_bbox(const json& j, const std::string& path, const char* key,
              const BBox& def) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 4) {
    fail(join(path, key), "expected [xmin, ymin, xmax, ymax]");
  }
  for (const auto& e : v) {
    if (!e.is_number()) fail(join(path, key), "expected four numbers");
  }
  return BBox{v[0].get<double>(), v[1].get<double>(), v[2].get<double>(),
              v[3].get<double>()};
}

json bbox_to_json(const BBox& b) {
  return json::array({b.xmin, b.ymin, b.xmax, b.ymax});
}

RegionSpec parse_region(const json& j, const std::string& path) {
  need_object(j, path);
  RegionSpec r;
  const std::string kind = get_string(j, path, "kind", "");
  if (kind == "all") {
    check_keys(j, path, {"kind"});
    r.kind = RegionKind::All;
  } else if (kind == "halfplane") {
    check_keys(j, path, {"kind", "axis", "op", "value"});
    r.kind = RegionKind::HalfPlane;
    const std::string axis = get_string(j, path, "axis", "x");
    if (axis != "x" && axis != "y") {
      fail(join(path, "axis"), "expected 'x' or 'y'");
    }
    r.axis = axis[0];
    r.op = get_string(j, path, "op", "le");
    if (r.op != "le" && r.op != "ge") {
      fail(join(path, "op"), "expected 'le' or 'ge'");
    }
    r.value = need_double(j, path, "value");
  } else if (kind == "disc") {
    check_keys(j, path, {"kind", "cx", "cy", "r"});
    r.kind = RegionKind::Disc;
    r.cx = need_double(j, path, "cx");
    r.cy = need_double(j, path, "cy");
    r.r = need_double(j, path, "r");
    if (!(r.r >= 0.0)) fail(join(path, "r"), "radius must be nonnegative");
  } else if (kind == "vertices") {
    check_keys(j, path, {"kind", "ids"});
    r.kind = RegionKind::Vertices;
    if (!j.contains("ids") || !j.at("ids").is_array()) {
      fail(join(path, "ids"), "expected an array of vertex ids");
    }
    for (const auto& e : j.at("ids")) {
      if (!e.is_number_integer()) {
        fail(join(path, "ids"), "expected integers");
      }
      r.ids.push_back(e.get<int>());
    }
  } else if (kind == "rim_nearest") {
    check_keys(j, path, {"kind", "x", "y"});
    r.kind = RegionKind::RimNearest;
    r.x = need_double(j, path, "x");
    r.y = need_double(j, path, "y");
  } else if (kind == "rim_arc") {
    check_keys(j, path, {"kind", "x", "y", "distance", "direction"});
    r.kind = RegionKind::RimArc;
    r.x = need_double(j, path, "x");
    r.y = need_double(j, path, "y");
    r.distance = need_double(j, path, "distance");
    if (!(r.distance >= 0.0)) {
      fail(join(path, "distance"), "distance must be nonnegative");
    }
    r.direction = get_string(j, path, "direction", "both");
    if (r.direction != "ccw" && r.direction != "cw" &&
        r.direction != "both") {
      fail(join(path, "direction"), "expected 'ccw', 'cw' or 'both'");
    }
  } else {
    fail(join(path, "kind"),
         "expected one of all, halfplane, disc, vertices, rim_nearest, "
         "rim_arc");
  }
  return r;
}

json region_to_json(const RegionSpec& r) {
  json j;
  switch (r.kind) {
    case RegionKind::All:
      j["kind"] = "all";
      break;
    case RegionKind::HalfPlane:
      j["kind"] = "halfplane";
      j["axis"] = std::string(1, r.axis);
      j["op"] = r.op;
      j["value"] = r.value;
      break;
    case RegionKind::Disc:
      j["kind"] = "disc";
      j["cx"] = r.cx;
      j["cy"] = r.cy;
      j["r"] = r.r;
      break;
    case RegionKind::Vertices:
      j["kind"] = "vertices";
      j["ids"] = r.ids;
      break;
    case RegionKind::RimNearest:
      j["kind"] = "rim_nearest";
      j["x"] = r.x;
      j["y"] = r.y;
      break;
    case RegionKind::RimArc:
      j["kind"] = "rim_arc";
      j["x"] = r.x;
      j["y"] = r.y;
      j["distance"] = r.distance;
      j["direction"] = r.direction;
      break;
  }
  return j;
}

std::vector<Placement> parse_placements(const json& j, const std::string& path,
                                        const char* key) {
  std::vector<Placement> out;
  if (!j.contains(key)) return out;
  const json& arr = j.at(key);
  if (!arr.is_array()) fail(join(path, key), "expected an array");
  for (size_t k = 0; k < arr.size(); ++k) {
    const std::string p = join(path, key) + "[" + std::to_string(k) + "]";
    check_keys(arr[k], p, {"region", "strength"});
    Placement pl;
    if (!arr[k].contains("region")) fail(p, "missing key 'region'");
    pl.region = parse_region(arr[k].at("region"), join(p, "region"));
    pl.strength = need_double(arr[k], p, "strength");
    if (!std::isfinite(pl.strength)) fail(p, "strength must be finite");
    out.push_back(std::move(pl));
  }
  return out;
}

json placements_to_json(const std::vector<Placement>& ps) {
  json arr = json::array();
  for (const Placement& p : ps) {
    arr.push_back({{"region", region_to_json(p.region)},
                   {"strength", p.strength}});
  }
  return arr;
}

FieldSpec parse_field(const json& j, const std::string& path) {
  need_object(j, path);
  FieldSpec f;
  const std::string kind = get_string(j, path, "kind", "constant");
  if (kind == "constant") {
    check_keys(j, path, {"kind", "value"});
    f.kind = FieldKind::Constant;
    f.value = get_double(j, path, "value", 1.0);
  } else if (kind == "uniform_perturbation") {
    check_keys(j, path, {"kind", "base", "epsilon"});
    f.kind = FieldKind::UniformPerturbation;
    f.base = get_double(j, path, "base", 1.0);
    f.epsilon = need_double(j, path, "epsilon");
  } else if (kind == "bernoulli") {
    check_keys(j, path, {"kind", "p", "epsilon"});
    f.kind = FieldKind::Bernoulli;
    f.p = get_double(j, path, "p", 0.2);
    if (!(f.p >= 0.0 && f.p <= 1.0)) {
      fail(join(path, "p"), "probability must be in [0, 1]");
    }
    f.epsilon = get_double(j, path, "epsilon", 0.0);
  } else if (kind == "scaled_uniform") {
    check_keys(j, path, {"kind", "epsilon"});
    f.kind = FieldKind::ScaledUniform;
    f.epsilon = need_double(j, path, "epsilon");
  } else {
    fail(join(path, "kind"),
         "expected one of constant, uniform_perturbation, bernoulli, "
         "scaled_uniform");
  }
  if (!std::isfinite(f.epsilon)) fail(path, "epsilon must be finite");
  return f;
}

json field_to_json(const FieldSpec& f) {
  json j;
  switch (f.kind) {
    case FieldKind::Constant:
      j["kind"] = "constant";
      j["value"] = f.value;
      break;
    case FieldKind::UniformPerturbation:
      j["kind"] = "uniform_perturbation";
      j["base"] = f.base;
      j["epsilon"] = f.epsilon;
      break;
    case FieldKind::Bernoulli:
      j["kind"] = "bernoulli";
      j["p"] = f.p;
      j["epsilon"] = f.epsilon;
      break;
    case FieldKind::ScaledUniform:
      j["kind"] = "scaled_uniform";
      j["epsilon"] = f.epsilon;
      break;
  }
  return j;
}

GridShape parse_shape(const std::string& s, const std::string& path) {
  if (s == "diamond") return GridShape::Diamond;
  if (s == "rectangle") return GridShape::Rectangle;
  if (s == "round") return GridShape::Round;
  if (s == "oval") return GridShape::Oval;
  fail(path, "expected one of diamond, rectangle, round, oval");
}

const char* shape_name(GridShape s) {
  switch (s) {
    case GridShape::Diamond: return "diamond";
    case GridShape::Rectangle: return "rectangle";
    case GridShape::Round: return "round";
    case GridShape::Oval: return "oval";
  }
  return "diamond";
}

GridSpec parse_grid(const json& j, const std::string& path) {
  GridSpec g;
  g.shape = parse_shape(get_string(j, path, "shape", "diamond"),
                        join(path, "shape"));
  if (g.shape == GridShape::Diamond) {
    check_keys(j, path, {"shape", "rows", "cols", "bbox"});
    g.rows = get_int(j, path, "rows", 9);
    g.cols = get_int(j, path, "cols", 9);
  } else {
    check_keys(j, path, {"shape", "resolution", "bbox"});
    g.resolution = get_int(j, path, "resolution", 9);
    g.bbox = BBox{-1.0, -1.0, 1.0, 1.0};
  }
  g.bbox = get_bbox(j, path, "bbox", g.bbox);
  return g;
}

json grid_to_json(const GridSpec& g) {
  json j;
  j["shape"] = shape_name(g.shape);
  if (g.shape == GridShape::Diamond) {
    j["rows"] = g.rows;
    j["cols"] = g.cols;
  } else {
    j["resolution"] = g.resolution;
  }
  j["bbox"] = bbox_to_json(g.bbox);
  return j;
}

ModelParams parse_params(const json& j, const std::string& path) {
  check_keys(j, path,
             {"delta", "sigma", "kappa", "gamma", "tau", "nu", "cell_volume",
              "relax_rate"});
  ModelParams p;
  p.delta = get_double(j, path, "delta", p.delta);
  p.sigma = get_double(j, path, "sigma", p.sigma);
  p.kappa = get_double(j, path, "kappa", p.kappa);
  p.gamma = get_double(j, path, "gamma", p.gamma);
  p.tau = get_double(j, path, "tau", p.tau);
  p.nu = get_double(j, path, "nu", p.nu);
  p.cell_volume = get_double(j, path, "cell_volume", p.cell_volume);
  p.relax_rate = get_double(j, path, "relax_rate", p.relax_rate);
  return p;
}

json params_to_json(const ModelParams& p) {
  json j;
  j["delta"] = p.delta;
  j["sigma"] = p.sigma;
  j["kappa"] = p.kappa;
  j["gamma"] = p.gamma;
  j["tau"] = p.tau;
  j["nu"] = p.nu;
  j["cell_volume"] = p.cell_volume;
  j["relax_rate"] = p.relax_rate;
  return j;
}

IntegratorConfig parse_integrator(const json& j, const std::string& path) {
  check_keys(j, path,
             {"rtol", "atol", "max_order", "first_step", "max_step", "t_max",
              "steady_tol", "snapshot_every"});
  IntegratorConfig c;
  c.rtol = get_double(j, path, "rtol", c.rtol);
  c.atol = get_double(j, path, "atol", c.atol);
  c.max_order = get_int(j, path, "max_order", c.max_order);
  c.first_step = get_double(j, path, "first_step", c.first_step);
  c.max_step = get_double(j, path, "max_step", c.max_step);
  c.t_max = get_double(j, path, "t_max", c.t_max);
  c.steady_tol = get_double(j, path, "steady_tol", c.steady_tol);
  c.snapshot_every = get_int(j, path, "snapshot_every", c.snapshot_every);
  return c;
}

json integrator_to_json(const IntegratorConfig& c) {
  json j;
  j["rtol"] = c.rtol;
  j["atol"] = c.atol;
  j["max_order"] = c.max_order;
  j["first_step"] = c.first_step;
  // JSON has no infinity; an absent max_step means unlimited.
  if (std::isfinite(c.max_step)) j["max_step"] = c.max_step;
  j["t_max"] = c.t_max;
  j["steady_tol"] = c.steady_tol;
  j["snapshot_every"] = c.snapshot_every;
  return j;
}

AnalysisSpec parse_analysis(const json& j, const std::string& path) {
  check_keys(j, path, {"symmetry_axis", "pattern_threshold", "energy_rtol"});
  AnalysisSpec a;
  a.symmetry_axis = get_string(j, path, "symmetry_axis", a.symmetry_axis);
  if (a.symmetry_axis != "none" && a.symmetry_axis != "vertical" &&
      a.symmetry_axis != "horizontal") {
    fail(join(path, "symmetry_axis"),
         "expected 'none', 'vertical' or 'horizontal'");
  }
  a.pattern_threshold = get_double(j, path, "pattern_threshold",
                                   a.pattern_threshold);
  a.energy_rtol = get_double(j, path, "energy_rtol", a.energy_rtol);
  return a;
}

json analysis_to_json(const AnalysisSpec& a) {
  json j;
  j["symmetry_axis"] = a.symmetry_axis;
  j["pattern_threshold"] = a.pattern_threshold;
  j["energy_rtol"] = a.energy_rtol;
  return j;
}

ContinuumSpec parse_continuum(const json& j, const std::string& path) {
  check_keys(j, path,
             {"nx", "ny", "bbox", "scheme", "dt", "t_max", "steady_tol",
              "snapshot_every", "diffusion2", "sources", "sinks", "initial",
              "tol", "max_iter"});
  ContinuumSpec c;
  c.nx = get_int(j, path, "nx", c.nx);
  c.ny = get_int(j, path, "ny", c.ny);
  c.bbox = get_bbox(j, path, "bbox", c.bbox);
  c.scheme = get_string(j, path, "scheme", c.scheme);
  if (c.scheme != "elliptic" && c.scheme != "parabolic") {
    fail(join(path, "scheme"), "expected 'elliptic' or 'parabolic'");
  }
  c.dt = get_double(j, path, "dt", c.dt);
  c.t_max = get_double(j, path, "t_max", c.t_max);
  c.steady_tol = get_double(j, path, "steady_tol", c.steady_tol);
  c.snapshot_every = get_int(j, path, "snapshot_every", c.snapshot_every);
  c.diffusion2 = get_double(j, path, "diffusion2", c.diffusion2);
  c.sources = parse_placements(j, path, "sources");
  c.sinks = parse_placements(j, path, "sinks");
  if (j.contains("initial")) {
    const std::string ip = join(path, "initial");
    check_keys(j.at("initial"), ip, {"X", "a"});
    if (j.at("initial").contains("X")) {
      c.initial_x = parse_field(j.at("initial").at("X"), join(ip, "X"));
    }
    if (j.at("initial").contains("a")) {
      c.initial_a = parse_field(j.at("initial").at("a"), join(ip, "a"));
    }
  }
  c.tol = get_double(j, path, "tol", c.tol);
  c.max_iter = get_int(j, path, "max_iter", c.max_iter);
  return c;
}

json continuum_to_json(const ContinuumSpec& c) {
  json j;
  j["nx"] = c.nx;
  j["ny"] = c.ny;
  j["bbox"] = bbox_to_json(c.bbox);
  j["scheme"] = c.scheme;
  j["dt"] = c.dt;
  j["t_max"] = c.t_max;
  j["steady_tol"] = c.steady_tol;
  j["snapshot_every"] = c.snapshot_every;
  j["diffusion2"] = c.diffusion2;
  j["sources"] = placements_to_json(c.sources);
  j["sinks"] = placements_to_json(c.sinks);
  json init;
  init["X"] = field_to_json(c.initial_x);
  if (c.initial_a) init["a"] = field_to_json(*c.initial_a);
  j["initial"] = std::move(init);
  j["tol"] = c.tol;
  j["max_iter"] = c.max_iter;
  return j;
}

OutputSpec parse_output(const json& j, const std::string& path) {
  check_keys(j, path, {"render", "stroke_min", "stroke_max", "canvas_width"});
  OutputSpec o;
  o.render = get_bool(j, path, "render", o.render);
  o.stroke_min = get_double(j, path, "stroke_min", o.stroke_min);
  o.stroke_max = get_double(j, path, "stroke_max", o.stroke_max);
  o.canvas_width = get_int(j, path, "canvas_width", o.canvas_width);
  return o;
}

json output_to_json(const OutputSpec& o) {
  json j;
  j["render"] = o.render;
  j["stroke_min"] = o.stroke_min;
  j["stroke_max"] = o.stroke_max;
  j["canvas_width"] = o.canvas_width;
  return j;
}

}  // namespace

RunConfig parse_config(const json& j) {
  need_object(j, "");
  RunConfig c;
  c.model = get_string(j, "", "model", "primary");
  const std::set<std::string> models{"primary", "hu_cai", "mitchison",
                                     "continuum", "p_laplacian"};
  if (!models.count(c.model)) {
    fail("model",
         "expected one of primary, hu_cai, mitchison, continuum, p_laplacian");
  }
  c.note = get_string(j, "", "note", "");

  if (c.is_continuum_model()) {
    check_keys(j, "", {"model", "note", "params", "continuum", "seed",
                       "output"});
  } else {
    check_keys(j, "", {"model", "note", "grid", "params", "sources", "sinks",
                       "initial", "seed", "integrator", "analysis", "output"});
  }

  if (j.contains("params")) c.params = parse_params(j.at("params"), "params");
  if (j.contains("output")) c.output = parse_output(j.at("output"), "output");
  if (j.contains("seed")) {
    const json& s = j.at("seed");
    // nlohmann stores small in-memory integer literals as signed, so accept
    // any integer that is not negative rather than insisting on the unsigned
    // storage type.
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<int64_t>() < 0)) {
      fail("seed", "expected a nonnegative integer");
    }
    c.seed = s.get<uint64_t>();
  }

  if (c.is_continuum_model()) {
    if (j.contains("continuum")) {
      c.continuum = parse_continuum(j.at("continuum"), "continuum");
    }
  } else {
    if (j.contains("grid")) c.grid = parse_grid(j.at("grid"), "grid");
    c.sources = parse_placements(j, "", "sources");
    c.sinks = parse_placements(j, "", "sinks");
    if (j.contains("initial")) {
      check_keys(j.at("initial"), "initial", {"a", "X"});
      if (j.at("initial").contains("a")) {
        c.initial_a = parse_field(j.at("initial").at("a"), "initial.a");
      }
      if (j.at("initial").contains("X")) {
        c.initial_x = parse_field(j.at("initial").at("X"), "initial.X");
      }
    }
    if (j.contains("integrator")) {
      c.integrator = parse_integrator(j.at("integrator"), "integrator");
    }
    if (j.contains("analysis")) {
      c.analysis = parse_analysis(j.at("analysis"), "analysis");
    }
  }
  validate_config(c);
  return c;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("could not open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON at byte " +
                      std::to_string(e.byte) + ": " + e.what());
  }
  return parse_config(j);
}

json config_to_json(const RunConfig& c) {
  json j;
  j["model"] = c.model;
  if (!c.note.empty()) j["note"] = c.note;
  j["params"] = params_to_json(c.params);
  j["output"] = output_to_json(c.output);
  if (c.seed) j["seed"] = *c.seed;
  if (c.is_continuum_model()) {
    j["continuum"] = continuum_to_json(c.continuum);
  } else {
    j["grid"] = grid_to_json(c.grid);
    j["sources"] = placements_to_json(c.sources);
    j["sinks"] = placements_to_json(c.sinks);
    j["initial"] = {{"a", field_to_json(c.initial_a)},
                    {"X", field_to_json(c.initial_x)}};
    j["integrator"] = integrator_to_json(c.integrator);
    j["analysis"] = analysis_to_json(c.analysis);
  }
  return j;
}

void validate_config(const RunConfig& c) {
  bool random = false;
  if (c.is_continuum_model()) {
    random = c.continuum.initial_x.random() ||
             (c.continuum.initial_a && c.continuum.initial_a->random());
    for (const auto* set : {&c.continuum.sources, &c.continuum.sinks}) {
      for (const Placement& p : *set) {
        if (p.region.kind != RegionKind::All &&
            p.region.kind != RegionKind::HalfPlane &&
            p.region.kind != RegionKind::Disc) {
          throw ConfigError(
              "config: continuum placements support only the all, halfplane "
              "and disc region kinds");
        }
      }
    }
  } else {
    random = c.initial_a.random() || c.initial_x.random();
  }
  if (random && !c.seed) {
    throw ConfigError(
        "config: seed is required when any initial condition is random");
  }
  c.integrator.validate();
}

std::vector<int> region_vertices(const Graph& g, const RegionSpec& r) {
  std::vector<int> out;
  switch (r.kind) {
    case RegionKind::All:
      out.resize(g.vertex_count());
      for (int v = 0; v < g.vertex_count(); ++v) out[v] = v;
      break;
    case RegionKind::HalfPlane:
      for (const Vertex& v : g.vertices()) {
        const double coord = r.axis == 'x' ? v.x : v.y;
        const bool in = r.op == "le" ? coord <= r.value : coord >= r.value;
        if (in) out.push_back(v.id);
      }
      break;
    case RegionKind::Disc:
      for (const Vertex& v : g.vertices()) {
        const double dx = v.x - r.cx, dy = v.y - r.cy;
        if (dx * dx + dy * dy <= r.r * r.r) out.push_back(v.id);
      }
      break;
    case RegionKind::Vertices:
      for (int id : r.ids) {
        if (id < 0 || id >= static_cast<int>(g.vertex_count())) {
          throw ConfigError("config: region vertex id " + std::to_string(id) +
                            " is out of range");
        }
        out.push_back(id);
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      break;
    case RegionKind::RimNearest:
      out.push_back(nearest_boundary_vertex(g, r.x, r.y));
      break;
    case RegionKind::RimArc: {
      std::vector<int> rim = boundary_vertices(g);
      // Order the rim as a polygon by angle around its centroid; all the
      // built-in shapes are convex so this matches the boundary walk.
      double cx = 0.0, cy = 0.0;
      for (int v : rim) {
        cx += g.vertices()[v].x;
        cy += g.vertices()[v].y;
      }
      cx /= rim.size();
      cy /= rim.size();
      std::sort(rim.begin(), rim.end(), [&](int a, int b) {
        const Vertex &va = g.vertices()[a], &vb = g.vertices()[b];
        const double ta = std::atan2(va.y - cy, va.x - cx);
        const double tb = std::atan2(vb.y - cy, vb.x - cx);
        if (ta != tb) return ta < tb;
        return a < b;
      });
      // Anchor: rim vertex nearest the given point.
      size_t anchor = 0;
      double best = std::numeric_limits<double>::infinity();
      for (size_t k = 0; k < rim.size(); ++k) {
        const Vertex& v = g.vertices()[rim[k]];
        const double d2 = (v.x - r.x) * (v.x - r.x) + (v.y - r.y) * (v.y - r.y);
        if (d2 < best) {
          best = d2;
          anchor = k;
        }
      }
      auto walk = [&](int step) {
        size_t pos = anchor;
        double arc = 0.0;
        int pick = rim[anchor];
        double pick_err = std::abs(arc - r.distance);
        for (size_t n = 0; n < rim.size(); ++n) {
          const size_t next = (pos + rim.size() + step) % rim.size();
          const Vertex &a = g.vertices()[rim[pos]], &b = g.vertices()[rim[next]];
          arc += std::hypot(b.x - a.x, b.y - a.y);
          pos = next;
          const double err = std::abs(arc - r.distance);
          if (err < pick_err) {
            pick_err = err;
            pick = rim[pos];
          }
        }
        return pick;
      };
      if (r.direction == "ccw" || r.direction == "both") {
        out.push_back(walk(+1));
      }
      if (r.direction == "cw" || r.direction == "both") {
        const int v = walk(-1);
        if (out.empty() || out[0] != v) out.push_back(v);
      }
      std::sort(out.begin(), out.end());
      break;
    }
  }
  return out;
}

std::vector<int> region_cells(const ContinuumGrid& grid, const RegionSpec& r) {
  std::vector<int> out;
  auto consider = [&](int i, int j) {
    const double x = grid.cell_x(i), y = grid.cell_y(j);
    switch (r.kind) {
      case RegionKind::All:
        return true;
      case RegionKind::HalfPlane: {
        const double coord = r.axis == 'x' ? x : y;
        return r.op == "le" ? coord <= r.value : coord >= r.value;
      }
      case RegionKind::Disc: {
        const double dx = x - r.cx, dy = y - r.cy;
        return dx * dx + dy * dy <= r.r * r.r;
      }
      default:
        throw ConfigError(
            "config: continuum placements support only the all, halfplane "
            "and disc region kinds");
    }
  };
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (consider(i, j)) out.push_back(grid.cell(i, j));
    }
  }
  return out;
}

Eigen::VectorXd assemble_vertex_field(const Graph& g,
                                      const std::vector<Placement>& placements,
                                      double default_value) {
  Eigen::VectorXd field =
      Eigen::VectorXd::Constant(g.vertex_count(), default_value);
  for (const Placement& p : placements) {
    for (int v : region_vertices(g, p.region)) field[v] = p.strength;
  }
  return field;
}

Eigen::VectorXd assemble_cell_field(const ContinuumGrid& grid,
                                    const std::vector<Placement>& placements,
                                    double default_value) {
  Eigen::VectorXd field =
      Eigen::VectorXd::Constant(grid.cells(), default_value);
  for (const Placement& p : placements) {
    for (int c : region_cells(grid, p.region)) field[c] = p.strength;
  }
  return field;
}

Eigen::VectorXd sample_field(const FieldSpec& f, Eigen::Index n, Rng& rng) {
  Eigen::VectorXd out(n);
  switch (f.kind) {
    case FieldKind::Constant:
      out.setConstant(f.value);
      break;
    case FieldKind::UniformPerturbation:
      for (Eigen::Index k = 0; k < n; ++k) {
        out[k] = f.base + f.epsilon * rng.uniform();
      }
      break;
    case FieldKind::Bernoulli:
      for (Eigen::Index k = 0; k < n; ++k) {
        out[k] = (rng.bernoulli(f.p) ? 1.0 : 0.0) + 1e-5 * f.epsilon;
      }
      break;
    case FieldKind::ScaledUniform:
      for (Eigen::Index k = 0; k < n; ++k) {
        out[k] = f.epsilon * rng.uniform();
      }
      break;
  }
  return out;
}

Graph build_grid(const GridSpec& spec) {
  if (spec.shape == GridShape::Diamond) {
    return build_diamond(spec.rows, spec.cols, spec.bbox);
  }
  return build_shape(spec.shape, spec.resolution, spec.bbox);
}

}  // namespace auxinet
