#include "auxinet/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "auxinet/continuum.hpp"
#include "auxinet/errors.hpp"

namespace auxinet {

namespace {

// Splits one CSV line on commas; no quoting is ever emitted by the writers
// so none is accepted here.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const char* what) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE) {
    throw ConfigError(std::string("could not parse ") + what + " from '" + s +
                      "'");
  }
  return v;
}

long parse_long(const std::string& s, const char* what) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE) {
    throw ConfigError(std::string("could not parse ") + what + " from '" + s +
                      "'");
  }
  return v;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  // Try increasing precision until the value survives the round trip; 17
  // significant digits always do.
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

nlohmann::json graph_to_json(const Graph& g) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const Vertex& v : g.vertices()) {
    j["vertices"].push_back({{"id", v.id}, {"x", v.x}, {"y", v.y}});
  }
  j["edges"] = nlohmann::json::array();
  for (const Edge& e : g.edges()) {
    j["edges"].push_back({{"i", e.i}, {"j", e.j}, {"length", e.length}});
  }
  if (g.has_lattice()) {
    nlohmann::json lat = nlohmann::json::array();
    for (const LatticeCoord& c : g.lattice()) {
      lat.push_back({{"row", c.row}, {"col", c.col}});
    }
    j["lattice"] = std::move(lat);
  }
  return j;
}

Graph graph_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("vertices") || !j.contains("edges")) {
    throw ConfigError("graph JSON needs 'vertices' and 'edges' arrays");
  }
  std::vector<Vertex> vertices;
  for (const auto& v : j.at("vertices")) {
    vertices.push_back({v.at("id").get<int>(), v.at("x").get<double>(),
                        v.at("y").get<double>()});
  }
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges")) {
    edges.push_back({e.at("i").get<int>(), e.at("j").get<int>(),
                     e.at("length").get<double>()});
  }
  std::vector<LatticeCoord> lattice;
  if (j.contains("lattice")) {
    for (const auto& c : j.at("lattice")) {
      lattice.push_back({c.at("row").get<int>(), c.at("col").get<int>()});
    }
  }
  return Graph(std::move(vertices), std::move(edges), std::move(lattice));
}

std::string vertex_series_csv(const std::vector<double>& times,
                              const std::vector<Eigen::VectorXd>& values,
                              const std::string& name) {
  if (times.size() != values.size()) {
    throw DimensionError("vertex series times and values differ in length");
  }
  std::string out = "t,vertex_id," + name + "\n";
  for (size_t s = 0; s < times.size(); ++s) {
    const std::string t = format_double(times[s]);
    for (int v = 0; v < values[s].size(); ++v) {
      out += t;
      out += ',';
      out += std::to_string(v);
      out += ',';
      out += format_double(values[s][v]);
      out += '\n';
    }
  }
  return out;
}

std::string edge_series_csv(const Graph& g, const std::vector<double>& times,
                            const std::vector<Eigen::VectorXd>& values,
                            const std::string& name) {
  if (times.size() != values.size()) {
    throw DimensionError("edge series times and values differ in length");
  }
  std::string out = "t,edge_i,edge_j," + name + "\n";
  for (size_t s = 0; s < times.size(); ++s) {
    if (values[s].size() != g.edge_count()) {
      throw DimensionError("edge series entry does not match the edge count");
    }
    const std::string t = format_double(times[s]);
    for (int e = 0; e < g.edge_count(); ++e) {
      out += t;
      out += ',';
      out += std::to_string(g.edges()[e].i);
      out += ',';
      out += std::to_string(g.edges()[e].j);
      out += ',';
      out += format_double(values[s][e]);
      out += '\n';
    }
  }
  return out;
}

std::string continuum_field_csv(const ContinuumField& field) {
  const ContinuumGrid& g = field.grid;
  std::string out = "i,j,a,x1,x2\n";
  for (int j = 0; j <= g.ny; ++j) {
    for (int i = 0; i <= g.nx; ++i) {
      const bool has_a = i < g.nx && j < g.ny;
      const bool has_x1 = j < g.ny;  // i runs the full 0..nx face range
      const bool has_x2 = i < g.nx;
      if (!has_a && !has_x1 && !has_x2) continue;
      out += std::to_string(i);
      out += ',';
      out += std::to_string(j);
      out += ',';
      if (has_a) out += format_double(field.a[g.cell(i, j)]);
      out += ',';
      if (has_x1) out += format_double(field.X1[g.xface(i, j)]);
      out += ',';
      if (has_x2) out += format_double(field.X2[g.yface(i, j)]);
      out += '\n';
    }
  }
  return out;
}

ContinuumField read_continuum_field_csv(const std::string& text, int nx,
                                        int ny, const BBox& bbox) {
  ContinuumField field;
  field.grid = ContinuumGrid{nx, ny, bbox};
  field.grid.validate();
  const ContinuumGrid& g = field.grid;
  field.a.setConstant(g.cells(), std::nan(""));
  field.X1.setConstant(g.xfaces(), std::nan(""));
  field.X2.setConstant(g.yfaces(), std::nan(""));

  const auto lines = split_lines(text);
  if (lines.empty() || split_csv(lines[0]) !=
                           std::vector<std::string>{"i", "j", "a", "x1", "x2"}) {
    throw ConfigError("continuum CSV must start with header i,j,a,x1,x2");
  }
  for (size_t k = 1; k < lines.size(); ++k) {
    if (lines[k].empty()) continue;
    const auto f = split_csv(lines[k]);
    if (f.size() != 5) throw ConfigError("continuum CSV row needs 5 fields");
    const long i = parse_long(f[0], "i"), j = parse_long(f[1], "j");
    if (i < 0 || i > nx || j < 0 || j > ny) {
      throw ConfigError("continuum CSV index out of range");
    }
    if (!f[2].empty()) {
      if (i >= nx || j >= ny) throw ConfigError("cell value outside the grid");
      field.a[g.cell(i, j)] = parse_double(f[2], "a");
    }
    if (!f[3].empty()) {
      if (j >= ny) throw ConfigError("x-face value outside the grid");
      field.X1[g.xface(i, j)] = parse_double(f[3], "x1");
    }
    if (!f[4].empty()) {
      if (i >= nx || j > ny) throw ConfigError("y-face value outside the grid");
      field.X2[g.yface(i, j)] = parse_double(f[4], "x2");
    }
  }
  if (field.a.hasNaN() || field.X1.hasNaN() || field.X2.hasNaN()) {
    throw ConfigError("continuum CSV is missing grid entries");
  }
  return field;
}

VertexSeries read_vertex_series_csv(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw ConfigError("vertex CSV is empty");
  const auto header = split_csv(lines[0]);
  if (header.size() != 3 || header[0] != "t" || header[1] != "vertex_id") {
    throw ConfigError("vertex CSV must start with header t,vertex_id,<name>");
  }
  VertexSeries series;
  std::vector<double> current;
  double current_t = 0.0;
  bool open = false;
  auto flush = [&] {
    if (!open) return;
    series.times.push_back(current_t);
    series.values.push_back(
        Eigen::Map<Eigen::VectorXd>(current.data(), current.size()));
    current.clear();
    open = false;
  };
  for (size_t k = 1; k < lines.size(); ++k) {
    if (lines[k].empty()) continue;
    const auto f = split_csv(lines[k]);
    if (f.size() != 3) throw ConfigError("vertex CSV row needs 3 fields");
    const double t = parse_double(f[0], "t");
    const long id = parse_long(f[1], "vertex_id");
    if (!open || t != current_t) {
      flush();
      current_t = t;
      open = true;
    }
    if (id != static_cast<long>(current.size())) {
      throw ConfigError("vertex CSV ids must be consecutive from 0 per time");
    }
    current.push_back(parse_double(f[2], header[2].c_str()));
  }
  flush();
  if (series.times.empty()) throw ConfigError("vertex CSV has no data rows");
  return series;
}

EdgeSeries read_edge_series_csv(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw ConfigError("edge CSV is empty");
  const auto header = split_csv(lines[0]);
  if (header.size() != 4 || header[0] != "t" || header[1] != "edge_i" ||
      header[2] != "edge_j") {
    throw ConfigError(
        "edge CSV must start with header t,edge_i,edge_j,<name>");
  }
  EdgeSeries series;
  std::vector<double> current;
  double current_t = 0.0;
  bool open = false;
  bool first_block = true;
  size_t column = 0;
  auto flush = [&] {
    if (!open) return;
    if (!first_block && current.size() != series.edges.size()) {
      throw ConfigError("edge CSV blocks differ in edge count");
    }
    series.times.push_back(current_t);
    series.values.push_back(
        Eigen::Map<Eigen::VectorXd>(current.data(), current.size()));
    current.clear();
    first_block = false;
    column = 0;
    open = false;
  };
  for (size_t k = 1; k < lines.size(); ++k) {
    if (lines[k].empty()) continue;
    const auto f = split_csv(lines[k]);
    if (f.size() != 4) throw ConfigError("edge CSV row needs 4 fields");
    const double t = parse_double(f[0], "t");
    const int i = static_cast<int>(parse_long(f[1], "edge_i"));
    const int j = static_cast<int>(parse_long(f[2], "edge_j"));
    if (!open || t != current_t) {
      flush();
      current_t = t;
      open = true;
    }
    if (first_block) {
      series.edges.emplace_back(i, j);
    } else {
      if (column >= series.edges.size() ||
          series.edges[column] != std::make_pair(i, j)) {
        throw ConfigError("edge CSV edge order changed between time blocks");
      }
    }
    ++column;
    current.push_back(parse_double(f[3], header[3].c_str()));
  }
  flush();
  if (series.times.empty()) throw ConfigError("edge CSV has no data rows");
  return series;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("could not open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("could not open '" + path + "' for writing");
  out << content;
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

}  // namespace auxinet
