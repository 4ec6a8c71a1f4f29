#include <algorithm>
#include <cmath>
#include <set>

#include "auxinet/errors.hpp"
#include "auxinet/graph.hpp"
#include "doctest.h"

using namespace auxinet;

namespace {

// Expected edge total for an unclipped rows x cols lattice with one diagonal
// per unit cell: axis edges in both directions plus (rows-1)(cols-1)
// diagonals.
int lattice_edges(int rows, int cols) {
  return (rows - 1) * cols + rows * (cols - 1) + (rows - 1) * (cols - 1);
}

}  // namespace

TEST_CASE("diamond lattice has the advertised counts") {
  const BBox box{-0.5, -1.5, 2.0, 0.5};
  const Graph g = build_diamond(9, 9, box);

  CHECK(g.vertex_count() == 81);
  CHECK(g.edge_count() == 208);
  CHECK(g.edge_count() == lattice_edges(9, 9));
  CHECK(g.connected());
  CHECK(g.has_lattice());

  // Non-square variant follows the same counting.
  const Graph s = build_diamond(3, 4, box);
  CHECK(s.vertex_count() == 12);
  CHECK(s.edge_count() == lattice_edges(3, 4));
}

TEST_CASE("diamond corners land on the bounding box midpoints") {
  const BBox box{-0.5, -1.5, 2.0, 0.5};
  const Graph g = build_diamond(9, 9, box);

  auto at = [&](int id) { return g.vertices()[static_cast<std::size_t>(id)]; };
  // Row-major ids: (row, col) -> row * cols + col. The rotated axes put
  // (0,0) at the bottom corner, (0,8) right, (8,0) left, (8,8) top.
  CHECK(at(0).x == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(at(0).y == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK(at(8).x == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(at(8).y == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(at(72).x == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(at(72).y == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(at(80).x == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(at(80).y == doctest::Approx(0.5).epsilon(1e-12));

  // The left corner is the only vertex in the half-plane x <= -0.4 used by
  // the baseline source region.
  int inside = 0;
  for (const Vertex& v : g.vertices())
    if (v.x <= -0.4) ++inside;
  CHECK(inside == 1);
}

TEST_CASE("edges are canonical, unique and positive length") {
  const Graph g = build_diamond(5, 7, BBox{0, 0, 2, 1});
  std::set<std::pair<int, int>> seen;
  for (const Edge& e : g.edges()) {
    CHECK(e.i < e.j);
    CHECK(e.length > 0.0);
    CHECK(seen.insert({e.i, e.j}).second);
    const Vertex& a = g.vertices()[static_cast<std::size_t>(e.i)];
    const Vertex& b = g.vertices()[static_cast<std::size_t>(e.j)];
    CHECK(e.length ==
          doctest::Approx(std::hypot(a.x - b.x, a.y - b.y)).epsilon(1e-12));
  }
  CHECK(std::is_sorted(g.edges().begin(), g.edges().end(),
                       [](const Edge& a, const Edge& b) {
                         return std::tie(a.i, a.j) < std::tie(b.i, b.j);
                       }));
}

TEST_CASE("shape builder keeps the advertised lattice subsets") {
  const BBox box{-1, -1, 1, 1};

  SUBCASE("rectangle is the full lattice") {
    const Graph g = build_shape(GridShape::Rectangle, 9, box);
    CHECK(g.vertex_count() == 81);
    CHECK(g.edge_count() == lattice_edges(9, 9));
  }

  SUBCASE("round keeps the inscribed circle") {
    const Graph g = build_shape(GridShape::Round, 9, box);
    // Frozen after inspection: 49 lattice points satisfy x^2 + y^2 <= 1 on
    // the 9 x 9 grid over [-1,1]^2 and they form one component.
    CHECK(g.vertex_count() == 49);
    CHECK(g.edge_count() == 120);
    CHECK(g.connected());
    for (const Vertex& v : g.vertices())
      CHECK(v.x * v.x + v.y * v.y <= 1.0 + 1e-9);
  }

  SUBCASE("oval keeps the inscribed ellipse") {
    const Graph g = build_shape(GridShape::Oval, 9, BBox{-2, -1, 2, 1});
    CHECK(g.connected());
    for (const Vertex& v : g.vertices())
      CHECK(v.x * v.x / 4.0 + v.y * v.y <= 1.0 + 1e-9);
    // The ellipse cannot hold more points than the bounding rectangle and
    // must keep the full horizontal axis row.
    CHECK(g.vertex_count() < 81);
    int on_axis = 0;
    for (const Vertex& v : g.vertices())
      if (v.y == doctest::Approx(0.0)) ++on_axis;
    CHECK(on_axis == 9);
  }

  SUBCASE("ids are compacted row-major after clipping") {
    const Graph g = build_shape(GridShape::Round, 9, box);
    REQUIRE(g.has_lattice());
    const auto& lat = g.lattice();
    for (std::size_t v = 1; v < lat.size(); ++v) {
      const bool ordered = lat[v - 1].row < lat[v].row ||
                           (lat[v - 1].row == lat[v].row &&
                            lat[v - 1].col < lat[v].col);
      CHECK(ordered);
    }
  }
}

TEST_CASE("boundary vertices are the ones missing axis neighbours") {
  const Graph g = build_diamond(9, 9, BBox{-0.5, -1.5, 2.0, 0.5});
  const std::vector<int> rim = boundary_vertices(g);
  CHECK(rim.size() == 32);  // perimeter of a full 9 x 9 lattice
  CHECK(std::is_sorted(rim.begin(), rim.end()));
  // Interior vertex: all four axis neighbours present.
  CHECK(std::find(rim.begin(), rim.end(), 40) == rim.end());
  // Corners are on the rim.
  for (int c : {0, 8, 72, 80})
    CHECK(std::find(rim.begin(), rim.end(), c) != rim.end());
}

TEST_CASE("nearest boundary vertex snaps and breaks ties by id") {
  const Graph g = build_diamond(9, 9, BBox{-0.5, -1.5, 2.0, 0.5});
  CHECK(nearest_boundary_vertex(g, -0.6, -0.5) == 72);
  CHECK(nearest_boundary_vertex(g, 2.5, -0.5) == 8);
  // Dead centre of the diamond: every rim vertex with minimal distance
  // competes; the smallest id must win deterministically.
  const int v = nearest_boundary_vertex(g, 0.75, -0.5);
  const std::vector<int> rim = boundary_vertices(g);
  double best = 1e300;
  for (int r : rim) {
    const Vertex& p = g.vertices()[static_cast<std::size_t>(r)];
    best = std::min(best, std::hypot(p.x - 0.75, p.y + 0.5));
  }
  const Vertex& p = g.vertices()[static_cast<std::size_t>(v)];
  CHECK(std::hypot(p.x - 0.75, p.y + 0.5) == doctest::Approx(best));
  for (int r : rim) {
    if (r >= v) break;
    const Vertex& q = g.vertices()[static_cast<std::size_t>(r)];
    CHECK(std::hypot(q.x - 0.75, q.y + 0.5) > best - 1e-12);
  }
}

TEST_CASE("reflection permutations are involutions that preserve edges") {
  const Graph g = build_diamond(9, 9, BBox{-0.5, -1.5, 2.0, 0.5});

  for (ReflectionAxis axis :
       {ReflectionAxis::VerticalMidline, ReflectionAxis::HorizontalMidline}) {
    const auto perm = reflection_permutation(g, axis);
    REQUIRE(perm.has_value());
    for (int v = 0; v < g.vertex_count(); ++v) {
      const int m = (*perm)[static_cast<std::size_t>(v)];
      CHECK((*perm)[static_cast<std::size_t>(m)] == v);
    }
    for (const Edge& e : g.edges())
      CHECK(g.edge_between((*perm)[static_cast<std::size_t>(e.i)],
                           (*perm)[static_cast<std::size_t>(e.j)]) >= 0);
  }
}

TEST_CASE("asymmetric graphs have no reflection permutation") {
  // L-shaped path: (0,0) - (1,0) - (1,1). Mirroring x about the midline maps
  // (0,0) to (1,0)'s column but there is no vertex at (0,1).
  std::vector<Vertex> vs = {{0, 0.0, 0.0}, {1, 1.0, 0.0}, {2, 1.0, 1.0}};
  std::vector<Edge> es = {{0, 1, 1.0}, {1, 2, 1.0}};
  const Graph g(vs, es);
  CHECK_FALSE(reflection_permutation(g, ReflectionAxis::VerticalMidline));
  CHECK_FALSE(reflection_permutation(g, ReflectionAxis::HorizontalMidline));
}

TEST_CASE("degenerate grid requests are rejected") {
  CHECK_THROWS_AS(build_diamond(1, 5, BBox{0, 0, 1, 1}), GeometryError);
  CHECK_THROWS_AS(build_diamond(5, 5, BBox{0, 0, 0, 1}), GeometryError);
  CHECK_THROWS_AS(build_shape(GridShape::Round, 1, BBox{0, 0, 1, 1}),
                  GeometryError);
}
