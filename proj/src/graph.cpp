#include "auxinet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "auxinet/errors.hpp"

namespace auxinet {
namespace {

double dist(const Vertex& a, const Vertex& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Largest connected component over an adjacency list; returns a keep-flag
// per vertex. Vertices with degree zero never win unless the graph has a
// single vertex.
std::vector<char> largest_component(
    const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> comp(n, -1);
  int best_root = -1;
  int best_size = 0;
  int n_comps = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    int size = 0;
    std::queue<int> q;
    q.push(s);
    comp[s] = n_comps;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      ++size;
      for (int w : adj[v]) {
        if (comp[w] < 0) {
          comp[w] = n_comps;
          q.push(w);
        }
      }
    }
    if (size > best_size) {
      best_size = size;
      best_root = n_comps;
    }
    ++n_comps;
  }
  std::vector<char> keep(n, 0);
  for (int v = 0; v < n; ++v) keep[v] = comp[v] == best_root ? 1 : 0;
  return keep;
}

struct LatticeBuild {
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::vector<LatticeCoord> lattice;
};

// Shared finishing pass: sort edges canonically and construct the Graph.
Graph finish(LatticeBuild&& b) {
  std::sort(b.edges.begin(), b.edges.end(), [](const Edge& a, const Edge& c) {
    return a.i != c.i ? a.i < c.i : a.j < c.j;
  });
  return Graph(std::move(b.vertices), std::move(b.edges),
               std::move(b.lattice));
}

}  // namespace

Graph::Graph(std::vector<Vertex> vertices, std::vector<Edge> edges,
             std::vector<LatticeCoord> lattice)
    : vertices_(std::move(vertices)),
      edges_(std::move(edges)),
      lattice_(std::move(lattice)) {
  const int n = static_cast<int>(vertices_.size());
  if (n == 0) throw GeometryError("graph has no vertices");
  for (int v = 0; v < n; ++v) {
    if (vertices_[static_cast<std::size_t>(v)].id != v)
      throw GeometryError("vertex ids must be 0..n-1 in order");
  }
  if (!lattice_.empty() && static_cast<int>(lattice_.size()) != n)
    throw DimensionError("lattice coordinate count != vertex count");

  adjacency_.assign(static_cast<std::size_t>(n), {});
  std::unordered_set<long long> seen;
  seen.reserve(edges_.size() * 2);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const Edge& ed = edges_[e];
    if (ed.i < 0 || ed.j < 0 || ed.i >= n || ed.j >= n)
      throw GeometryError("edge endpoint out of range");
    if (ed.i >= ed.j)
      throw GeometryError("edges must be stored with i < j");
    if (!(ed.length > 0.0) || !std::isfinite(ed.length))
      throw GeometryError("edge length must be positive and finite");
    long long key = static_cast<long long>(ed.i) * n + ed.j;
    if (!seen.insert(key).second)
      throw GeometryError("duplicate edge " + std::to_string(ed.i) + "-" +
                          std::to_string(ed.j));
    adjacency_[static_cast<std::size_t>(ed.i)].emplace_back(
        ed.j, static_cast<int>(e));
    adjacency_[static_cast<std::size_t>(ed.j)].emplace_back(
        ed.i, static_cast<int>(e));
  }

  std::vector<char> visited(static_cast<std::size_t>(n), 0);
  std::queue<int> q;
  q.push(0);
  visited[0] = 1;
  int reached = 0;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    ++reached;
    for (auto [w, e] : adjacency_[static_cast<std::size_t>(v)]) {
      (void)e;
      if (!visited[static_cast<std::size_t>(w)]) {
        visited[static_cast<std::size_t>(w)] = 1;
        q.push(w);
      }
    }
  }
  connected_ = reached == n;
}

int Graph::edge_between(int i, int j) const {
  if (i < 0 || j < 0 || i >= vertex_count() || j >= vertex_count()) return -1;
  for (auto [w, e] : adjacency_[static_cast<std::size_t>(i)]) {
    if (w == j) return e;
  }
  return -1;
}

BBox Graph::extent() const {
  BBox b;
  b.xmin = b.ymin = std::numeric_limits<double>::infinity();
  b.xmax = b.ymax = -std::numeric_limits<double>::infinity();
  for (const Vertex& v : vertices_) {
    b.xmin = std::min(b.xmin, v.x);
    b.xmax = std::max(b.xmax, v.x);
    b.ymin = std::min(b.ymin, v.y);
    b.ymax = std::max(b.ymax, v.y);
  }
  return b;
}

Graph build_diamond(int rows, int cols, const BBox& bbox) {
  if (rows < 2 || cols < 2)
    throw GeometryError("diamond grid needs rows >= 2 and cols >= 2");
  if (bbox.degenerate())
    throw GeometryError("bbox must have positive width and height");

  // The rotated lattice spans rows+cols-2 steps along both diagonals, so a
  // single scale maps it onto the bbox.
  const int span = rows + cols - 2;
  LatticeBuild b;
  b.vertices.reserve(static_cast<std::size_t>(rows) * cols);
  b.lattice.reserve(b.vertices.capacity());

  auto id = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int u = c - r;          // position along the x diagonal
      const int v = c + r;          // position along the y diagonal
      Vertex vx;
      vx.id = id(r, c);
      vx.x = bbox.xmin + bbox.width() * (u + rows - 1) / span;
      vx.y = bbox.ymin + bbox.height() * v / span;
      b.vertices.push_back(vx);
      b.lattice.push_back({r, c});
    }
  }

  auto add_edge = [&](int v0, int v1) {
    Edge e;
    e.i = std::min(v0, v1);
    e.j = std::max(v0, v1);
    e.length = dist(b.vertices[static_cast<std::size_t>(e.i)],
                    b.vertices[static_cast<std::size_t>(e.j)]);
    b.edges.push_back(e);
  };

  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) add_edge(id(r, c), id(r, c + 1));
      if (r + 1 < rows) add_edge(id(r, c), id(r + 1, c));
      if (r + 1 < rows && c + 1 < cols) {
        // Checkerboard diagonals keep the pattern mirror-symmetric.
        if ((r + c) % 2 == 0)
          add_edge(id(r, c), id(r + 1, c + 1));
        else
          add_edge(id(r, c + 1), id(r + 1, c));
      }
    }
  }
  return finish(std::move(b));
}

Graph build_shape(GridShape shape, int resolution, const BBox& bbox) {
  if (shape == GridShape::Diamond)
    return build_diamond(resolution, resolution, bbox);
  if (resolution < 2) throw GeometryError("shape grid needs resolution >= 2");
  if (bbox.degenerate())
    throw GeometryError("bbox must have positive width and height");

  const int n = resolution;
  const double cx = 0.5 * (bbox.xmin + bbox.xmax);
  const double cy = 0.5 * (bbox.ymin + bbox.ymax);
  // Inscribed circle for Round, inscribed ellipse for Oval.
  const double rx = shape == GridShape::Round
                        ? 0.5 * std::min(bbox.width(), bbox.height())
                        : 0.5 * bbox.width();
  const double ry = shape == GridShape::Round ? rx : 0.5 * bbox.height();

  auto inside = [&](double x, double y) {
    if (shape == GridShape::Rectangle) return true;
    const double ex = (x - cx) / rx;
    const double ey = (y - cy) / ry;
    return ex * ex + ey * ey <= 1.0 + 1e-12;
  };

  // Row-major full lattice first, then clip.
  std::vector<Vertex> full(static_cast<std::size_t>(n) * n);
  std::vector<char> kept(full.size(), 0);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      Vertex v;
      v.id = r * n + c;
      v.x = bbox.xmin + bbox.width() * c / (n - 1);
      v.y = bbox.ymin + bbox.height() * r / (n - 1);
      full[static_cast<std::size_t>(v.id)] = v;
      kept[static_cast<std::size_t>(v.id)] = inside(v.x, v.y) ? 1 : 0;
    }
  }

  auto id = [n](int r, int c) { return r * n + c; };
  std::vector<std::pair<int, int>> raw_edges;
  auto try_edge = [&](int v0, int v1) {
    if (kept[static_cast<std::size_t>(v0)] &&
        kept[static_cast<std::size_t>(v1)])
      raw_edges.emplace_back(std::min(v0, v1), std::max(v0, v1));
  };
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (c + 1 < n) try_edge(id(r, c), id(r, c + 1));
      if (r + 1 < n) try_edge(id(r, c), id(r + 1, c));
      if (r + 1 < n && c + 1 < n) {
        if ((r + c) % 2 == 0)
          try_edge(id(r, c), id(r + 1, c + 1));
        else
          try_edge(id(r, c + 1), id(r + 1, c));
      }
    }
  }

  // Drop isolated vertices, then keep the largest connected piece so the
  // result is always usable by the solvers.
  std::vector<std::vector<int>> adj(full.size());
  for (auto [i, j] : raw_edges) {
    adj[static_cast<std::size_t>(i)].push_back(j);
    adj[static_cast<std::size_t>(j)].push_back(i);
  }
  for (std::size_t v = 0; v < full.size(); ++v) {
    if (adj[v].empty()) kept[v] = 0;
  }
  std::vector<char> in_main = largest_component(adj);
  int survivors = 0;
  std::vector<int> remap(full.size(), -1);
  LatticeBuild b;
  for (std::size_t v = 0; v < full.size(); ++v) {
    if (!kept[v] || !in_main[v]) continue;
    remap[v] = survivors++;
    Vertex vx = full[v];
    vx.id = remap[v];
    b.vertices.push_back(vx);
    b.lattice.push_back(
        {static_cast<int>(v) / n, static_cast<int>(v) % n});
  }
  if (survivors < 2)
    throw GeometryError("clipping left no usable grid at this resolution");
  for (auto [i, j] : raw_edges) {
    int ri = remap[static_cast<std::size_t>(i)];
    int rj = remap[static_cast<std::size_t>(j)];
    if (ri < 0 || rj < 0) continue;
    Edge e;
    e.i = std::min(ri, rj);
    e.j = std::max(ri, rj);
    e.length = dist(b.vertices[static_cast<std::size_t>(e.i)],
                    b.vertices[static_cast<std::size_t>(e.j)]);
    b.edges.push_back(e);
  }
  return finish(std::move(b));
}

std::vector<int> boundary_vertices(const Graph& g) {
  if (!g.has_lattice())
    throw GeometryError("rim detection needs lattice metadata");
  std::unordered_map<long long, int> present;
  present.reserve(g.lattice().size());
  auto key = [](int r, int c) {
    return (static_cast<long long>(r) << 32) ^
           static_cast<long long>(static_cast<unsigned>(c));
  };
  for (int v = 0; v < g.vertex_count(); ++v) {
    const LatticeCoord& lc = g.lattice()[static_cast<std::size_t>(v)];
    present[key(lc.row, lc.col)] = v;
  }
  std::vector<int> rim;
  for (int v = 0; v < g.vertex_count(); ++v) {
    const LatticeCoord& lc = g.lattice()[static_cast<std::size_t>(v)];
    int have = 0;
    have += present.count(key(lc.row - 1, lc.col)) ? 1 : 0;
    have += present.count(key(lc.row + 1, lc.col)) ? 1 : 0;
    have += present.count(key(lc.row, lc.col - 1)) ? 1 : 0;
    have += present.count(key(lc.row, lc.col + 1)) ? 1 : 0;
    if (have < 4) rim.push_back(v);
  }
  return rim;
}

int nearest_boundary_vertex(const Graph& g, double x, double y) {
  std::vector<int> rim = boundary_vertices(g);
  if (rim.empty()) throw GeometryError("graph has no rim vertices");
  int best = rim.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (int v : rim) {
    const Vertex& vx = g.vertices()[static_cast<std::size_t>(v)];
    double d = (vx.x - x) * (vx.x - x) + (vx.y - y) * (vx.y - y);
    if (d < best_d) {
      best_d = d;
      best = v;
    }
  }
  return best;
}

std::optional<std::vector<int>> reflection_permutation(const Graph& g,
                                                       ReflectionAxis axis) {
  const BBox ext = g.extent();
  const double scale = std::max({ext.width(), ext.height(), 1.0});
  const double tol = 1e-9 * scale;
  const int n = g.vertex_count();

  std::vector<int> perm(static_cast<std::size_t>(n), -1);
  for (int v = 0; v < n; ++v) {
    const Vertex& vx = g.vertices()[static_cast<std::size_t>(v)];
    double mx = vx.x;
    double my = vx.y;
    if (axis == ReflectionAxis::VerticalMidline)
      mx = ext.xmin + ext.xmax - vx.x;
    else
      my = ext.ymin + ext.ymax - vx.y;
    int match = -1;
    for (int w = 0; w < n; ++w) {
      const Vertex& wx = g.vertices()[static_cast<std::size_t>(w)];
      if (std::abs(wx.x - mx) <= tol && std::abs(wx.y - my) <= tol) {
        match = w;
        break;
      }
    }
    if (match < 0) return std::nullopt;
    perm[static_cast<std::size_t>(v)] = match;
  }

  // The permutation must also carry edges to edges with matching lengths.
  for (const Edge& e : g.edges()) {
    int me = g.edge_between(perm[static_cast<std::size_t>(e.i)],
                            perm[static_cast<std::size_t>(e.j)]);
    if (me < 0) return std::nullopt;
    if (std::abs(g.edges()[static_cast<std::size_t>(me)].length - e.length) >
        tol)
      return std::nullopt;
  }
  return perm;
}

}  // namespace auxinet
