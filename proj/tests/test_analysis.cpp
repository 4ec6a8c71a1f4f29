#include <cmath>

#include "auxinet/analysis.hpp"
#include "auxinet/errors.hpp"
#include "auxinet/graph.hpp"
#include "auxinet/systems.hpp"
#include "doctest.h"

using namespace auxinet;

namespace {

Graph two_node() {
  return Graph({{0, 0.0, 0.0}, {1, 1.0, 0.0}}, {{0, 1, 1.0}});
}

Graph path3() {
  return Graph({{0, 0.0, 0.0}, {1, 1.0, 0.0}, {2, 2.0, 0.0}},
               {{0, 1, 1.0}, {1, 2, 1.0}});
}

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v[k++] = x;
  return v;
}

NetworkState state(double t, Eigen::VectorXd a, Eigen::VectorXd X) {
  NetworkState st;
  st.t = t;
  st.a = std::move(a);
  st.X = std::move(X);
  return st;
}

}  // namespace

TEST_CASE("radius-law report is clean at the two-cell fixed point") {
  const Graph g = two_node();
  ModelParams p;
  p.delta = 1.0;
  p.kappa = 2.0;
  p.gamma = 0.5;
  p.tau = 1.0;
  p.S = vec({1.0, 0.0});
  p.I = vec({0.0, 1.0});

  const MurrayReport r =
      murray_residual(g, p, state(0.0, vec({2.0, 1.0}), vec({1.0})));
  CHECK(r.max_relative < 1e-14);
  CHECK(r.max_edge_relative < 1e-14);
  REQUIRE(r.skipped.size() == 1);
  CHECK(r.skipped[0] == 1);  // the removal vertex is never rated
  CHECK(std::isnan(r.vertex_residual[1]));
  CHECK(r.input_was_steady);
}

TEST_CASE("radius-law balance detects constructed flux imbalances") {
  // Straight conduit 0 -> 1 -> 2 with production injected at the middle:
  // outgoing capacity term must exceed the incoming one by exactly S_1.
  const Graph g = path3();
  ModelParams p;
  p.delta = 1.0;
  p.kappa = 2.0;
  p.gamma = 1.0;
  p.tau = 1.0;
  p.S = vec({0.0, 0.5, 0.0});
  p.I = vec({1.0, 0.0, 1.0});

  // (tau X^2)^(1/2) = X here, so X = (1, 1.5) balances vertex 1 exactly.
  const MurrayReport ok = murray_residual(
      g, p, state(0.0, vec({3.0, 2.0, 1.0}), vec({1.0, 1.5})), false);
  CHECK(std::abs(ok.vertex_residual[1]) < 1e-14);

  const MurrayReport bad = murray_residual(
      g, p, state(0.0, vec({3.0, 2.0, 1.0}), vec({1.0, 1.2})), false);
  CHECK(bad.vertex_residual[1] == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(bad.max_relative > 0.05);
  CHECK_FALSE(bad.input_was_steady);
}

TEST_CASE("bound audit accepts clean runs and flags violations") {
  const Graph g = two_node();
  ModelParams p;
  p.kappa = 2.0;
  p.gamma = 0.5;
  p.S = vec({0.0, 0.0});
  p.I = vec({0.0, 0.0});
  const PrimarySystem sys(g, p);

  SimulationResult run;
  run.times = {0.0, 1.0};
  run.states = {sys.pack(vec({1.0, 1.0}), vec({1.0})),
                sys.pack(vec({0.9, 0.9}), vec({0.5}))};

  SUBCASE("source-free decay passes with the right norm bound") {
    const BoundReport r = check_bounds(g, p, run);
    CHECK(r.pass());
    CHECK(r.source_free);
    CHECK(r.alpha == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(r.min_a == doctest::Approx(0.9));
    CHECK(r.min_x == doctest::Approx(0.5));
  }

  SUBCASE("exceeding the source-free ceiling is a violation") {
    run.states[1] = sys.pack(vec({1.6, 0.9}), vec({0.5}));
    const BoundReport r = check_bounds(g, p, run);
    CHECK_FALSE(r.pass());
  }

  SUBCASE("negative activity is a violation") {
    run.states[1] = sys.pack(vec({0.9, 0.9}), vec({-1e-3}));
    const BoundReport r = check_bounds(g, p, run);
    CHECK_FALSE(r.pass());
  }

  SUBCASE("nonpositive concentration is a violation") {
    run.states[1] = sys.pack(vec({0.0, 0.9}), vec({0.5}));
    const BoundReport r = check_bounds(g, p, run);
    CHECK_FALSE(r.pass());
  }

  SUBCASE("zero concentration behind a dead edge is informational") {
    // The vertex exchanges nothing once its only edge is at zero, so a = 0
    // is a legitimate resting value there rather than a lost bound.
    run.states[1] = sys.pack(vec({0.0, 0.9}), vec({0.0}));
    const BoundReport r = check_bounds(g, p, run);
    CHECK(r.pass());
    REQUIRE(r.notes.size() == 1);
    CHECK(r.notes[0].find("a[0]") != std::string::npos);
  }

  SUBCASE("with production the ceiling does not apply") {
    p.S = vec({1.0, 0.0});
    run.states[1] = sys.pack(vec({5.0, 0.9}), vec({0.5}));
    const BoundReport r = check_bounds(g, p, run);
    CHECK(r.pass());
    CHECK_FALSE(r.source_free);
  }
}

TEST_CASE("energy audit spots manufactured increases") {
  const Graph g = two_node();
  ModelParams p;
  p.gamma = 1.0;
  p.nu = 1.0;
  p.S = vec({1.0, -1.0});

  SimulationResult run;
  run.times = {0.0, 1.0, 2.0};

  SUBCASE("relaxation toward the balanced conduit dissipates") {
    run.states = {vec({4.0}), vec({2.0}), vec({1.0})};
    const EnergyReport r = energy_dissipation(g, p, run);
    REQUIRE(r.energy.size() == 3);
    CHECK(r.energy[0] == doctest::Approx(4.25));
    CHECK(r.energy[2] == doctest::Approx(2.0));
    CHECK(r.monotone);
    CHECK(r.max_increase <= 0.0);
  }

  SUBCASE("an inflating conduit raises the metabolic bill") {
    run.states = {vec({1.0}), vec({2.0}), vec({4.0})};
    const EnergyReport r = energy_dissipation(g, p, run);
    CHECK_FALSE(r.monotone);
    CHECK(r.max_increase > 0.1);
  }
}

TEST_CASE("mirror mismatch is the worst relative pair difference") {
  const Graph g = build_diamond(3, 3, BBox{0, 0, 1, 1});
  Eigen::VectorXd a = Eigen::VectorXd::Constant(9, 1.0);
  Eigen::VectorXd X = Eigen::VectorXd::Constant(g.edge_count(), 1.0);

  SUBCASE("constant fields are exactly symmetric") {
    CHECK(symmetry_error(g, state(0, a, X),
                         ReflectionAxis::VerticalMidline) == 0.0);
    CHECK(symmetry_error(g, state(0, a, X),
                         ReflectionAxis::HorizontalMidline) == 0.0);
  }

  SUBCASE("one lopsided vertex shows up scaled by the field maximum") {
    a[1] = 2.0;  // on neither midline of the 3 x 3 diamond
    const double err =
        symmetry_error(g, state(0, a, X), ReflectionAxis::VerticalMidline);
    CHECK(err == doctest::Approx(1.0 / 2.0).epsilon(1e-12));
  }

  SUBCASE("mirror-consistent perturbations stay symmetric") {
    const auto perm =
        reflection_permutation(g, ReflectionAxis::VerticalMidline);
    REQUIRE(perm);
    a[1] = 2.0;
    a[(*perm)[1]] = 2.0;
    CHECK(symmetry_error(g, state(0, a, X),
                         ReflectionAxis::VerticalMidline) < 1e-15);
  }

  SUBCASE("asymmetric graphs are refused") {
    const Graph lop =
        Graph({{0, 0.0, 0.0}, {1, 1.0, 0.0}, {2, 1.0, 1.0}},
              {{0, 1, 1.0}, {1, 2, 1.0}});
    CHECK_THROWS_AS(
        symmetry_error(lop, state(0, vec({1, 1, 1}), vec({1, 1})),
                       ReflectionAxis::VerticalMidline),
        GeometryError);
  }
}

TEST_CASE("pattern extent counts edges at or above the threshold") {
  NetworkState st = state(0, vec({1.0, 1.0}), vec({0.2, 0.5, 0.7, 0.49}));
  CHECK(pattern_extent(st, 0.5) == 2);
  CHECK(pattern_extent(st, 0.0) == 4);
  CHECK(pattern_extent(st, 2.0) == 0);
}

TEST_CASE("region overlap is perfect when the rankings agree") {
  // Path with strictly increasing concentration and edge activity: the top
  // quartiles of vertices and strongest-incident-edge values coincide.
  const int n = 8;
  std::vector<Vertex> vs;
  std::vector<Edge> es;
  for (int v = 0; v < n; ++v) vs.push_back({v, static_cast<double>(v), 0.0});
  for (int v = 0; v + 1 < n; ++v) es.push_back({v, v + 1, 1.0});
  const Graph g(vs, es);

  Eigen::VectorXd a(n), X(n - 1);
  for (int v = 0; v < n; ++v) a[v] = v;
  for (int e = 0; e + 1 < n; ++e) X[e] = e + 1;
  CHECK(high_region_overlap(g, state(0, a, X)) == doctest::Approx(1.0));

  // Reversing the concentration ranking sends the overlap to zero.
  for (int v = 0; v < n; ++v) a[v] = n - v;
  CHECK(high_region_overlap(g, state(0, a, X)) == doctest::Approx(0.0));
}
