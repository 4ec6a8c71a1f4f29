#pragma once

#include <optional>
#include <utility>
#include <vector>

namespace auxinet {

struct BBox {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 1.0;
  double ymax = 1.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  bool degenerate() const { return !(width() > 0.0) || !(height() > 0.0); }
};

struct Vertex {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
};

// Edges are stored once with i < j. Orientation-sensitive quantities (fluxes)
// are reported in this canonical direction.
struct Edge {
  int i = 0;
  int j = 0;
  double length = 0.0;
};

// Integer lattice coordinate a grid builder assigned to a vertex. Kept around
// because the rim test counts missing axis neighbours, which positions alone
// do not recover reliably after clipping.
struct LatticeCoord {
  int row = 0;
  int col = 0;
};

class Graph {
 public:
  Graph(std::vector<Vertex> vertices, std::vector<Edge> edges,
        std::vector<LatticeCoord> lattice = {});

  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }

  // (neighbour vertex id, edge index) pairs for vertex v.
  const std::vector<std::pair<int, int>>& neighbors(int v) const {
    return adjacency_[static_cast<std::size_t>(v)];
  }

  // Edge index joining i and j, or -1 when absent.
  int edge_between(int i, int j) const;

  bool connected() const { return connected_; }

  bool has_lattice() const { return !lattice_.empty(); }
  const std::vector<LatticeCoord>& lattice() const { return lattice_; }

  // Smallest bounding box of the vertex positions.
  BBox extent() const;

 private:
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<LatticeCoord> lattice_;
  std::vector<std::vector<std::pair<int, int>>> adjacency_;
  bool connected_ = false;
};

enum class GridShape { Diamond, Rectangle, Round, Oval };

// Diamond-oriented lattice: rows x cols vertices on a 45-degree rotated grid,
// affinely scaled into bbox. Axis edges plus one diagonal per unit cell whose
// direction alternates in a checkerboard, so reflections of the grid map the
// edge set onto itself.
Graph build_diamond(int rows, int cols, const BBox& bbox);

// Axis-aligned n x n lattice with the same alternating-diagonal pattern,
// clipped to the rectangle (no-op), the inscribed circle, or the inscribed
// ellipse of bbox. Isolated vertices are dropped and only the largest
// connected component is kept; ids are compacted row-major.
Graph build_shape(GridShape shape, int resolution, const BBox& bbox);

// Rim vertices: lattice vertices missing at least one of their four axis
// neighbours. Ascending ids.
std::vector<int> boundary_vertices(const Graph& g);

// Rim vertex closest to (x, y) in Euclidean distance; ties break to the
// smallest id.
int nearest_boundary_vertex(const Graph& g, double x, double y);

enum class ReflectionAxis {
  VerticalMidline,    // x -> xmin + xmax - x
  HorizontalMidline,  // y -> ymin + ymax - y
};

// Vertex permutation realizing the reflection, if the graph (positions and
// edges) is symmetric under it. perm[v] is the mirror image of v.
std::optional<std::vector<int>> reflection_permutation(const Graph& g,
                                                       ReflectionAxis axis);

}  // namespace auxinet
