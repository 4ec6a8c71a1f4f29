#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "json.hpp"

#include "auxinet/graph.hpp"
#include "auxinet/ode.hpp"

namespace auxinet {

// Shortest round-trippable decimal form of a double (%.17g is the fallback;
// shorter forms are used when they parse back exactly). Keeps artifacts
// byte-stable across runs.
std::string format_double(double v);

nlohmann::json graph_to_json(const Graph& g);
Graph graph_from_json(const nlohmann::json& j);

// Time series of vertex values as CSV with header t,vertex_id,<name>; one
// row per (snapshot, vertex).
std::string vertex_series_csv(const std::vector<double>& times,
                              const std::vector<Eigen::VectorXd>& values,
                              const std::string& name);

// Time series of edge values as CSV with header t,edge_i,edge_j,<name>.
std::string edge_series_csv(const Graph& g, const std::vector<double>& times,
                            const std::vector<Eigen::VectorXd>& values,
                            const std::string& name);

// One continuum state as flat CSV with header i,j,a,x1,x2 where row (i,j)
// carries the cell value a(i,j) for i<nx, j<ny, the x-face value at x-index
// i (the left face of cell column i, so i runs to nx) and the y-face value
// at y-index j. Fields that do not exist at a given (i,j) are left empty.
struct ContinuumField;
std::string continuum_field_csv(const ContinuumField& field);
ContinuumField read_continuum_field_csv(const std::string& text, int nx,
                                        int ny, const BBox& bbox);

struct VertexSeries {
  std::vector<double> times;              // one entry per snapshot
  std::vector<Eigen::VectorXd> values;    // aligned with times
};

struct EdgeSeries {
  std::vector<double> times;
  std::vector<std::pair<int, int>> edges;  // canonical (i, j) per column
  std::vector<Eigen::VectorXd> values;
};

// Inverse of the writers above; used by `check` to re-derive analysis from
// stored artifacts. Throws ConfigError on malformed input.
VertexSeries read_vertex_series_csv(const std::string& text);
EdgeSeries read_edge_series_csv(const std::string& text);

// Whole-file helpers.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace auxinet
