#include <cmath>

#include "auxinet/errors.hpp"
#include "auxinet/graph.hpp"
#include "auxinet/kirchhoff.hpp"
#include "auxinet/rng.hpp"
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

// Weighted-Laplacian residual ||L P - S||_2, assembled independently of the
// solver: net outflow at i is sum_j c_ij (P_i - P_j) / L_ij.
double laplacian_residual(const Graph& g, const Eigen::VectorXd& cond,
                          const Eigen::VectorXd& P, const Eigen::VectorXd& S) {
  Eigen::VectorXd out = -S;
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edges()[static_cast<std::size_t>(e)];
    const double w = cond[e] / ed.length;
    out[ed.i] += w * (P[ed.i] - P[ed.j]);
    out[ed.j] += w * (P[ed.j] - P[ed.i]);
  }
  return out.norm();
}

}  // namespace

TEST_CASE("unit two-node network splits the potential evenly") {
  const Graph g = two_node();
  double res = -1.0;
  const Eigen::VectorXd P =
      kirchhoff_solve(g, vec({1.0}), vec({1.0, -1.0}), 1e-12, &res);
  CHECK(P[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(P[1] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(res >= 0.0);
  CHECK(res <= 1e-12 * std::sqrt(2.0));
}

TEST_CASE("path with unequal conductivities drops potential per segment") {
  const Graph g = path3();
  const Eigen::VectorXd P =
      kirchhoff_solve(g, vec({1.0, 2.0}), vec({1.0, 0.0, -1.0}));
  // Unit flux through both edges: drop 1 across c=1, drop 1/2 across c=2,
  // then shift to zero mean.
  CHECK(P[0] == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK(P[1] == doctest::Approx(-1.0 / 6.0).epsilon(1e-12));
  CHECK(P[2] == doctest::Approx(-4.0 / 6.0).epsilon(1e-12));
  CHECK(std::abs(P.sum()) < 1e-12);
}

TEST_CASE("solutions satisfy the vertex balance on a random lattice") {
  const Graph g = build_diamond(5, 5, BBox{0, 0, 1, 1});
  Rng rng(7);
  Eigen::VectorXd cond(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) cond[e] = rng.uniform(0.1, 3.0);
  Eigen::VectorXd S(g.vertex_count());
  for (int v = 0; v < g.vertex_count(); ++v) S[v] = rng.uniform(-1.0, 1.0);
  S.array() -= S.mean();

  const Eigen::VectorXd P = kirchhoff_solve(g, cond, S);
  CHECK(laplacian_residual(g, cond, P, S) <= 1e-10 * S.norm());
  CHECK(std::abs(P.sum()) < 1e-9);
}

TEST_CASE("unbalanced injections are rejected") {
  const Graph g = two_node();
  CHECK_THROWS_AS(kirchhoff_solve(g, vec({1.0}), vec({1.0, -0.9})),
                  ConservationError);
}

TEST_CASE("a fully pruned cut makes the strict solve singular") {
  const Graph g = path3();
  // Dead middle edge disconnects the source from the sink.
  CHECK_THROWS_AS(kirchhoff_solve(g, vec({1.0, 0.0}), vec({1.0, 0.0, -1.0})),
                  SingularSystemError);
}

TEST_CASE("block solve handles pruned components independently") {
  const Graph g = path3();

  SUBCASE("balanced per component") {
    // Edge 1-2 pruned; source/sink pair lives entirely in component {0, 1}.
    double res = -1.0;
    const Eigen::VectorXd P = kirchhoff_solve_blocks(
        g, vec({2.0, 0.0}), vec({1.0, -1.0, 0.0}), 1e-12, &res);
    // Drop 1/2 across the live edge, each component de-meaned.
    CHECK(P[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(P[1] == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(P[2] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(res <= 1e-10);
  }

  SUBCASE("source separated from its sink") {
    CHECK_THROWS_AS(kirchhoff_solve_blocks(g, vec({0.0, 1.0}),
                                           vec({1.0, 0.0, -1.0})),
                    SingularSystemError);
  }

  SUBCASE("agrees with the strict solve on connected problems") {
    const Graph d = build_diamond(4, 4, BBox{0, 0, 1, 1});
    Rng rng(11);
    Eigen::VectorXd cond(d.edge_count());
    for (int e = 0; e < d.edge_count(); ++e) cond[e] = rng.uniform(0.5, 2.0);
    Eigen::VectorXd S = Eigen::VectorXd::Zero(d.vertex_count());
    S[0] = 1.0;
    S[d.vertex_count() - 1] = -1.0;
    const Eigen::VectorXd a = kirchhoff_solve(d, cond, S);
    const Eigen::VectorXd b = kirchhoff_solve_blocks(d, cond, S);
    CHECK((a - b).lpNorm<Eigen::Infinity>() < 1e-10);
  }
}

TEST_CASE("negative conductivities are rejected") {
  const Graph g = two_node();
  CHECK_THROWS_AS(kirchhoff_solve(g, vec({-0.5}), vec({1.0, -1.0})),
                  ConfigError);
}
