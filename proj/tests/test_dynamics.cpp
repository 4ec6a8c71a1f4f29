#include <cmath>

#include "auxinet/dynamics.hpp"
#include "auxinet/errors.hpp"
#include "auxinet/graph.hpp"
#include "auxinet/rng.hpp"
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

ModelParams two_cell_params() {
  ModelParams p;
  p.delta = 1.0;
  p.sigma = 1.0;
  p.kappa = 2.0;
  p.gamma = 0.5;
  p.tau = 1.0;
  p.S = vec({1.0, 0.0});
  p.I = vec({0.0, 1.0});
  return p;
}

// Dense forward-difference Jacobian of an OdeSystem, the reference for the
// hand-coded sparse ones.
Eigen::MatrixXd fd_jacobian(const OdeSystem& sys, double t,
                            const Eigen::VectorXd& y) {
  const int n = sys.size();
  Eigen::MatrixXd J(n, n);
  Eigen::VectorXd f0(n), f1(n);
  sys.rhs(t, y, f0);
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd yk = y;
    const double h = 1e-7 * std::max(1.0, std::abs(y[k]));
    yk[k] += h;
    sys.rhs(t, yk, f1);
    J.col(k) = (f1 - f0) / h;
  }
  return J;
}

}  // namespace

TEST_CASE("two-cell rhs matches hand-computed values") {
  const Graph g = two_node();
  const ModelParams p = two_cell_params();
  Eigen::VectorXd da(2), dX(1);

  SUBCASE("at the uniform start") {
    primary_rhs(g, p, vec({1.0, 1.0}), vec({1.0}), da, dX);
    // No gradient: pure production on 0, pure decay on 1, activity decays.
    CHECK(da[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(da[1] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(dX[0] == doctest::Approx(-1.0).epsilon(1e-14));
  }

  SUBCASE("the closed-form fixed point is stationary") {
    primary_rhs(g, p, vec({2.0, 1.0}), vec({1.0}), da, dX);
    CHECK(std::abs(da[0]) < 1e-14);
    CHECK(std::abs(da[1]) < 1e-14);
    CHECK(std::abs(dX[0]) < 1e-14);
  }
}

TEST_CASE("activity rhs is finite and zero-invariant at X = 0") {
  const Graph g = two_node();
  ModelParams p = two_cell_params();
  Eigen::VectorXd da(2), dX(1);

  SUBCASE("kappa > gamma keeps 0 absorbing") {
    primary_rhs(g, p, vec({5.0, 1.0}), vec({0.0}), da, dX);
    CHECK(dX[0] == 0.0);
    // The concentration equation sees no transport through a dead edge.
    CHECK(da[0] == doctest::Approx(1.0));
    CHECK(da[1] == doctest::Approx(-1.0));
  }

  SUBCASE("kappa == gamma pushes a dead edge back up") {
    p.kappa = 1.0;
    p.gamma = 1.0;
    primary_rhs(g, p, vec({5.0, 1.0}), vec({0.0}), da, dX);
    // Growth term becomes |grad|^kappa with no X factor left.
    CHECK(dX[0] == doctest::Approx(std::pow(4.0, 1.0)).epsilon(1e-12));
  }

  SUBCASE("negative off-manifold X is treated as dead") {
    primary_rhs(g, p, vec({5.0, 1.0}), vec({-0.3}), da, dX);
    CHECK(std::isfinite(dX[0]));
    // Only the linear decay acts, pushing back toward 0.
    CHECK(dX[0] == doctest::Approx(0.3).epsilon(1e-12));
  }
}

TEST_CASE("edge gradient flux uses the canonical orientation") {
  const Graph g = path3();
  const Eigen::VectorXd q =
      edge_gradient_flux(g, vec({2.0, 2.0}), vec({3.0, 1.0, 0.0}));
  // Positive when the field decreases along i -> j, scaled by coeff / L.
  CHECK(q[0] == doctest::Approx(-4.0));
  CHECK(q[1] == doctest::Approx(-2.0));
}

TEST_CASE("primary jacobian agrees with finite differences") {
  const Graph g = build_diamond(3, 3, BBox{0, 0, 1, 1});
  ModelParams p;
  p.kappa = 2.0;
  p.gamma = 0.5;
  p.S = Eigen::VectorXd::Zero(9);
  p.S[0] = 2.0;
  p.I = Eigen::VectorXd::Constant(9, 0.5);
  const PrimarySystem sys(g, p);

  Rng rng(3);
  Eigen::VectorXd a(9), X(g.edge_count());
  for (int v = 0; v < 9; ++v) a[v] = rng.uniform(0.5, 2.0);
  for (int e = 0; e < g.edge_count(); ++e) X[e] = rng.uniform(0.2, 1.5);
  const Eigen::VectorXd y = sys.pack(a, X);

  Eigen::SparseMatrix<double> J(sys.size(), sys.size());
  sys.jacobian(0.0, y, J);
  const Eigen::MatrixXd dense = Eigen::MatrixXd(J);
  const Eigen::MatrixXd ref = fd_jacobian(sys, 0.0, y);
  CHECK((dense - ref).lpNorm<Eigen::Infinity>() <
        1e-5 * std::max(1.0, ref.lpNorm<Eigen::Infinity>()));
}

TEST_CASE("conductivity adaptation reproduces the two-node flow oracle") {
  const Graph g = two_node();
  ModelParams p;
  p.sigma = 1.0;
  p.gamma = 1.0;
  p.tau = 1.0;
  p.nu = 1.0;
  p.S = vec({1.0, -1.0});
  Eigen::VectorXd dC(1);

  SUBCASE("balanced at C = 1") {
    double res = -1.0;
    const Eigen::VectorXd P = hu_cai_pressure(g, p, vec({1.0}), &res);
    CHECK(P[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(P[1] == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(res <= 1e-12);
    hu_cai_rhs(g, p, vec({1.0}), dC);
    CHECK(std::abs(dC[0]) < 1e-13);
  }

  SUBCASE("oversized conduit shrinks") {
    // Flux is still 1 (set by conservation), so Q^2 / C^2 = 1/16 < tau^2.
    hu_cai_rhs(g, p, vec({4.0}), dC);
    CHECK(dC[0] == doctest::Approx(-3.75).epsilon(1e-12));
  }
}

TEST_CASE("path pressures drop per segment under adaptation parameters") {
  const Graph g = path3();
  ModelParams p;
  p.gamma = 1.0;
  p.S = vec({1.0, 0.0, -1.0});
  const Eigen::VectorXd P = hu_cai_pressure(g, p, vec({1.0, 2.0}));
  CHECK(P[0] == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK(P[1] == doctest::Approx(-1.0 / 6.0).epsilon(1e-12));
  CHECK(P[2] == doctest::Approx(-4.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("network energy matches the two-node closed form") {
  const Graph g = two_node();
  ModelParams p;
  p.gamma = 1.0;
  p.nu = 1.0;
  p.S = vec({1.0, -1.0});
  // E = (Q^2 / C + (nu/gamma) C^gamma) L with unit flux.
  CHECK(network_energy(g, p, vec({1.0})) == doctest::Approx(2.0));
  CHECK(network_energy(g, p, vec({4.0})) == doctest::Approx(4.25));

  // The adaptation direction must not increase the energy (gradient flow).
  Eigen::VectorXd dC(1);
  hu_cai_rhs(g, p, vec({4.0}), dC);
  const double e0 = network_energy(g, p, vec({4.0}));
  const double e1 = network_energy(g, p, vec({4.0 + 1e-4 * dC[0]}));
  CHECK(e1 < e0);
}

TEST_CASE("a dead conduit carries no flow and only its metabolic term") {
  const Graph g = path3();
  ModelParams p;
  p.gamma = 1.0;
  p.nu = 2.0;
  p.S = vec({1.0, -1.0, 0.0});
  // Second edge pruned: block pressures keep the pair solvable.
  const double e = network_energy(g, p, vec({2.0, 0.0}));
  // Q = 1 through the live edge: 1/2 + 2*2 = 4.5, dead edge adds nothing.
  CHECK(e == doctest::Approx(4.5).epsilon(1e-12));
}

TEST_CASE("signal model conserves total signal and orients capacity growth") {
  const Graph g = path3();
  ModelParams p;
  p.cell_volume = 1.0;
  p.relax_rate = 1.0;
  p.S = vec({0.0, 0.0, 0.0});
  Eigen::VectorXd ds(3), dD(2);

  SUBCASE("zero production means exact conservation of the rhs") {
    mitchison_rhs(g, p, vec({3.0, 1.0, 0.5}), vec({1.0, 2.0}), ds, dD);
    CHECK(std::abs(ds.sum()) < 1e-14);
  }

  SUBCASE("production shifts the total at exactly its own rate") {
    p.S = vec({0.7, 0.0, -0.2});
    mitchison_rhs(g, p, vec({3.0, 1.0, 0.5}), vec({1.0, 2.0}), ds, dD);
    CHECK(ds.sum() == doctest::Approx(0.5).epsilon(1e-13));
  }

  SUBCASE("capacity grows only along the canonical flux direction") {
    // s decreasing along 0 -> 1 -> 2: canonical flux positive on both edges.
    mitchison_rhs(g, p, vec({3.0, 1.0, 0.5}), vec({1.0, 2.0}), ds, dD);
    // phi_0 = 1 * (3 - 1) / 1 = 2, phi_1 = 2 * 0.5 = 1.
    CHECK(dD[0] == doctest::Approx(4.0 - 1.0).epsilon(1e-12));
    CHECK(dD[1] == doctest::Approx(1.0 - 2.0).epsilon(1e-12));

    // Reversed signal: flux against the canonical direction only decays D.
    mitchison_rhs(g, p, vec({0.5, 1.0, 3.0}), vec({1.0, 2.0}), ds, dD);
    CHECK(dD[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(dD[1] == doctest::Approx(-2.0).epsilon(1e-12));
  }
}

TEST_CASE("system jacobians match finite differences") {
  const Graph g = build_diamond(3, 3, BBox{0, 0, 1, 1});
  Rng rng(17);

  SUBCASE("signal model (finite-difference default)") {
    ModelParams p;
    p.S = Eigen::VectorXd::Zero(9);
    const MitchisonSystem sys(g, p);
    Eigen::VectorXd s(9), D(g.edge_count());
    for (int v = 0; v < 9; ++v) s[v] = rng.uniform(-1.0, 2.0);
    for (int e = 0; e < g.edge_count(); ++e) D[e] = rng.uniform(0.3, 1.5);
    const Eigen::VectorXd y = sys.pack(s, D);
    Eigen::SparseMatrix<double> J(sys.size(), sys.size());
    sys.jacobian(0.0, y, J);
    const Eigen::MatrixXd ref = fd_jacobian(sys, 0.0, y);
    CHECK((Eigen::MatrixXd(J) - ref).lpNorm<Eigen::Infinity>() <
          1e-4 * std::max(1.0, ref.lpNorm<Eigen::Infinity>()));
  }
}

TEST_CASE("parameter validation flags the delicate regimes") {
  const Graph g = two_node();
  ModelParams p = two_cell_params();

  SUBCASE("exponents inside the proven window are quiet") {
    p.kappa = 1.2;
    p.gamma = 0.5;
    CHECK(validate_params(g, p, ModelKind::Primary).empty());
  }

  SUBCASE("exponents outside the proven window warn") {
    // The classic kappa = 2, gamma = 1/2 sits above the window.
    CHECK_FALSE(validate_params(g, p, ModelKind::Primary).empty());
    p.kappa = 0.4;  // kappa <= gamma is the singular side
    CHECK_FALSE(validate_params(g, p, ModelKind::Primary).empty());
  }

  SUBCASE("hard errors on broken input") {
    p.S = vec({1.0});
    CHECK_THROWS_AS(validate_params(g, p, ModelKind::Primary), DimensionError);
    p = two_cell_params();
    p.tau = -1.0;
    CHECK_THROWS_AS(validate_params(g, p, ModelKind::Primary), ConfigError);
  }
}
