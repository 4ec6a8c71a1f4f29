#include <cmath>

#include "auxinet/continuum.hpp"
#include "auxinet/errors.hpp"
#include "auxinet/rng.hpp"
#include "doctest.h"

using namespace auxinet;

namespace {

constexpr double kPi = 3.14159265358979323846;

ContinuumGrid unit_grid(int n) {
  ContinuumGrid g;
  g.nx = n;
  g.ny = n;
  g.bbox = BBox{0.0, 0.0, 1.0, 1.0};
  return g;
}

// Max-norm error of the elliptic solve against a smooth reference with
// homogeneous Neumann data: a* = cos(pi x) cos(pi y), unit fields, and the
// matching right-hand side S = (2 delta pi^2 + 1) a*.
double manufactured_error(int n, double delta) {
  const ContinuumGrid g = unit_grid(n);
  ContinuumParams p;
  p.delta = delta;
  p.S.resize(g.cells());
  p.I = Eigen::VectorXd::Ones(g.cells());
  Eigen::VectorXd exact(g.cells());
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double v = std::cos(kPi * g.cell_x(i)) * std::cos(kPi * g.cell_y(j));
      exact[g.cell(i, j)] = v;
      p.S[g.cell(i, j)] = (2.0 * delta * kPi * kPi + 1.0) * v;
    }
  const Eigen::VectorXd X1 = Eigen::VectorXd::Ones(g.xfaces());
  const Eigen::VectorXd X2 = Eigen::VectorXd::Ones(g.yfaces());
  const Eigen::VectorXd a = solve_elliptic(g, p, X1, X2);
  return (a - exact).lpNorm<Eigen::Infinity>();
}

}  // namespace

TEST_CASE("elliptic solve converges at second order") {
  const double e16 = manufactured_error(16, 1.0);
  const double e32 = manufactured_error(32, 1.0);
  const double order = std::log2(e16 / e32);
  CHECK(order > 1.8);
  CHECK(order < 2.2);
}

TEST_CASE("elliptic solve balances removal against production") {
  const ContinuumGrid g = unit_grid(24);
  ContinuumParams p;
  p.S = Eigen::VectorXd::Zero(g.cells());
  p.S.head(40).setConstant(3.0);
  p.I = Eigen::VectorXd::Constant(g.cells(), 0.7);
  Rng rng(5);
  Eigen::VectorXd X1(g.xfaces()), X2(g.yfaces());
  for (int k = 0; k < X1.size(); ++k) X1[k] = rng.uniform(0.1, 2.0);
  for (int k = 0; k < X2.size(); ++k) X2[k] = rng.uniform(0.1, 2.0);

  const Eigen::VectorXd a = solve_elliptic(g, p, X1, X2);
  // Zero-flux walls: integral of I a equals the injected total exactly.
  const double in = p.S.sum() * g.cell_volume();
  const double out = (p.I.array() * a.array()).sum() * g.cell_volume();
  CHECK(out == doctest::Approx(in).epsilon(1e-10));
  // Positivity of the M-matrix solve with nonnegative sources.
  CHECK(a.minCoeff() >= 0.0);
}

TEST_CASE("elliptic solve requires strictly positive removal") {
  const ContinuumGrid g = unit_grid(8);
  ContinuumParams p;
  p.S = Eigen::VectorXd::Ones(g.cells());
  p.I = Eigen::VectorXd::Zero(g.cells());
  CHECK_THROWS_AS(solve_elliptic(g, p, Eigen::VectorXd::Ones(g.xfaces()),
                                 Eigen::VectorXd::Ones(g.yfaces())),
                  ConfigError);
}

TEST_CASE("transport step honours the exponential lower barrier") {
  const ContinuumGrid g = unit_grid(16);
  ContinuumParams p;
  p.kappa = 2.0;
  p.gamma = 0.5;
  p.tau = 1.0;
  p.diffusion2 = 1e-2;
  p.S = Eigen::VectorXd::Zero(g.cells());
  p.S[g.cell(2, 8)] = 40.0;
  p.I = Eigen::VectorXd::Ones(g.cells());

  ContinuumField f;
  f.grid = g;
  Rng rng(9);
  f.X1.resize(g.xfaces());
  f.X2.resize(g.yfaces());
  for (int k = 0; k < f.X1.size(); ++k) f.X1[k] = rng.uniform(0.5, 2.0);
  for (int k = 0; k < f.X2.size(); ++k) f.X2[k] = rng.uniform(0.5, 2.0);
  const double x_min0 = std::min(f.X1.minCoeff(), f.X2.minCoeff());

  const double dt = 1e-3;
  double t = 0.0;
  for (int k = 0; k < 200; ++k) {
    f.a = solve_elliptic(g, p, f.X1, f.X2);
    step_transport(f, p, dt);
    t += dt;
    const double floor = x_min0 * std::exp(-p.tau * t) - 1e-6 * t;
    CHECK(std::min(f.X1.minCoeff(), f.X2.minCoeff()) >= floor);
  }
}

TEST_CASE("runaway growth inside one step is refused") {
  const ContinuumGrid g = unit_grid(8);
  ContinuumParams p;
  p.kappa = 2.0;
  p.gamma = 0.5;
  p.S = Eigen::VectorXd::Zero(g.cells());
  p.I = Eigen::VectorXd::Ones(g.cells());

  ContinuumField f;
  f.grid = g;
  // Steep manufactured concentration: per-face gradients ~ 8 * 50.
  f.a.resize(g.cells());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      f.a[g.cell(i, j)] = 50.0 * ((i + j) % 2);
  f.X1 = Eigen::VectorXd::Ones(g.xfaces());
  f.X2 = Eigen::VectorXd::Ones(g.yfaces());
  CHECK_THROWS_AS(step_transport(f, p, 1.0), IntegrationError);
}

TEST_CASE("coupled run with zero production decays at the linear rate") {
  const ContinuumGrid g = unit_grid(16);
  ContinuumParams p;
  p.kappa = 2.0;
  p.gamma = 0.5;
  p.tau = 1.0;
  p.S = Eigen::VectorXd::Zero(g.cells());
  p.I = Eigen::VectorXd::Ones(g.cells());

  const double dt = 1e-3;
  const double t_end = 0.5;
  const ContinuumResult r = run_continuum(
      g, p, Eigen::VectorXd::Ones(g.xfaces()), Eigen::VectorXd::Ones(g.yfaces()),
      dt, t_end, ContinuumScheme::EllipticParabolic, 0.0, 50);

  const ContinuumField f = r.final_field();
  // No production: the concentration vanishes and the activity sees no
  // growth, so every face decays like the scalar (1 + dt tau)^-n.
  CHECK(f.a.lpNorm<Eigen::Infinity>() < 1e-12);
  const double mean =
      (f.X1.sum() + f.X2.sum()) / static_cast<double>(f.X1.size() + f.X2.size());
  const double rel_gap =
      std::abs(mean - std::exp(-p.tau * t_end)) / std::exp(-p.tau * t_end);
  // First-order splitting error: |ln(1+dt tau)/dt - tau| * t ~ tau^2 t dt / 2.
  CHECK(rel_gap < p.tau * p.tau * t_end * dt);
}

TEST_CASE("parabolic concentration scheme agrees with the elliptic limit") {
  // With fast relaxation the time-dependent concentration equation settles
  // onto the quasi-static solve; compare end states of the two schemes.
  const ContinuumGrid g = unit_grid(12);
  ContinuumParams p;
  p.kappa = 2.0;
  p.gamma = 0.5;
  p.S = Eigen::VectorXd::Zero(g.cells());
  p.S[g.cell(2, 6)] = 20.0;
  // Fast removal: the O(e^{-I t}) relaxation transient is gone well before
  // the end of the run.
  p.I = Eigen::VectorXd::Constant(g.cells(), 5.0);

  const double dt = 2e-3;
  const ContinuumResult re = run_continuum(
      g, p, Eigen::VectorXd::Ones(g.xfaces()), Eigen::VectorXd::Ones(g.yfaces()),
      dt, 1.0, ContinuumScheme::EllipticParabolic, 0.0, 0);
  const ContinuumResult rp = run_continuum(
      g, p, Eigen::VectorXd::Ones(g.xfaces()), Eigen::VectorXd::Ones(g.yfaces()),
      dt, 1.0, ContinuumScheme::ParabolicParabolic, 0.0, 0);

  const ContinuumField fe = re.final_field();
  const ContinuumField fp = rp.final_field();
  const double scale = fe.a.lpNorm<Eigen::Infinity>();
  REQUIRE(scale > 0.0);
  CHECK((fe.a - fp.a).lpNorm<Eigen::Infinity>() / scale < 0.05);
}

TEST_CASE("steady minimizer matches the linear solve at tiny exponents") {
  const ContinuumGrid g = unit_grid(16);
  ContinuumParams p;
  p.delta = 1.0;
  p.kappa = 1e-6;
  p.gamma = 1e-6;
  p.tau = 1.0;
  p.S = Eigen::VectorXd::Zero(g.cells());
  p.S[g.cell(3, 3)] = 30.0;
  p.I = Eigen::VectorXd::Ones(g.cells());

  const PLaplacianResult r = p_laplacian_steady(g, p);
  REQUIRE(r.converged);

  ContinuumParams lin = p;
  lin.kappa = 0.0;
  const Eigen::VectorXd a_lin = solve_elliptic(
      g, lin, Eigen::VectorXd::Constant(g.xfaces(), 1.0 / p.tau),
      Eigen::VectorXd::Constant(g.yfaces(), 1.0 / p.tau));
  const double rel = (r.a - a_lin).lpNorm<Eigen::Infinity>() /
                     a_lin.lpNorm<Eigen::Infinity>();
  CHECK(rel < 1e-4);
}

TEST_CASE("steady minimizer descends monotonically at real exponents") {
  const ContinuumGrid g = unit_grid(16);
  ContinuumParams p;
  p.kappa = 2.0;
  p.gamma = 0.5;
  p.S = Eigen::VectorXd::Zero(g.cells());
  p.S[g.cell(8, 2)] = 25.0;
  p.I = Eigen::VectorXd::Ones(g.cells());

  const PLaplacianResult r = p_laplacian_steady(g, p);
  CHECK(r.converged);
  REQUIRE(r.objective.size() >= 2);
  for (std::size_t k = 1; k < r.objective.size(); ++k)
    CHECK(r.objective[k] <= r.objective[k - 1]);
  // The recovered activity is |grad a|^kappa / tau with silent walls.
  CHECK(r.X1.minCoeff() >= 0.0);
  for (int j = 0; j < g.ny; ++j) {
    CHECK(r.X1[g.xface(0, j)] == 0.0);
    CHECK(r.X1[g.xface(g.nx, j)] == 0.0);
  }
}

TEST_CASE("grid and parameter validation catches shape mismatches") {
  ContinuumGrid g = unit_grid(8);
  ContinuumParams p;
  p.S = Eigen::VectorXd::Zero(10);  // wrong size
  p.I = Eigen::VectorXd::Ones(g.cells());
  CHECK_THROWS_AS(p.validate(g, true), DimensionError);

  g.nx = 0;
  CHECK_THROWS_AS(g.validate(), GeometryError);
}
