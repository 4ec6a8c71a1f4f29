#include "auxinet/continuum.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "auxinet/errors.hpp"

namespace auxinet {

namespace {

// Same convention as the network rhs: nonpositive bases with positive
// exponents collapse to zero instead of NaN.
double clamped_pow(double x, double e) {
  if (x <= 0.0) return e == 0.0 ? 1.0 : 0.0;
  return std::pow(x, e);
}

using SpMat = Eigen::SparseMatrix<double>;
using Trip = Eigen::Triplet<double>;

void check_finite(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite()) {
    throw IntegrationError(std::string(what) +
                           " became non-finite during a continuum step");
  }
}

// Gradient of the cell field across interior faces; boundary faces stay 0
// (zero-flux condition).
void face_gradients(const ContinuumGrid& g, const Eigen::VectorXd& a,
                    Eigen::VectorXd& g1, Eigen::VectorXd& g2) {
  g1.setZero(g.xfaces());
  g2.setZero(g.yfaces());
  const double hx = g.hx(), hy = g.hy();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i)
      g1[g.xface(i, j)] = (a[g.cell(i, j)] - a[g.cell(i - 1, j)]) / hx;
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      g2[g.yface(i, j)] = (a[g.cell(i, j)] - a[g.cell(i, j - 1)]) / hy;
}

// Assembles the operator of -delta div(X grad a) + diag_extra with the given
// face activities (clamped at zero). diag_extra is per cell and already
// includes the volume factor.
SpMat assemble_cell_operator(const ContinuumGrid& g, double delta,
                             const Eigen::VectorXd& X1,
                             const Eigen::VectorXd& X2,
                             const Eigen::VectorXd& diag_extra) {
  const double hx = g.hx(), hy = g.hy();
  std::vector<Trip> trips;
  trips.reserve(static_cast<size_t>(g.cells()) * 5);
  for (int c = 0; c < g.cells(); ++c) trips.emplace_back(c, c, diag_extra[c]);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 1; i < g.nx; ++i) {
      const double w = delta * std::max(X1[g.xface(i, j)], 0.0) * hy / hx;
      if (w <= 0.0) continue;
      const int l = g.cell(i - 1, j), r = g.cell(i, j);
      trips.emplace_back(l, l, w);
      trips.emplace_back(r, r, w);
      trips.emplace_back(l, r, -w);
      trips.emplace_back(r, l, -w);
    }
  }
  for (int j = 1; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double w = delta * std::max(X2[g.yface(i, j)], 0.0) * hx / hy;
      if (w <= 0.0) continue;
      const int b = g.cell(i, j - 1), t = g.cell(i, j);
      trips.emplace_back(b, b, w);
      trips.emplace_back(t, t, w);
      trips.emplace_back(b, t, -w);
      trips.emplace_back(t, b, -w);
    }
  }
  SpMat A(g.cells(), g.cells());
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

// 5-point Neumann Laplacian contribution for one face family laid out as an
// mx-by-my node grid, scaled by `coeff`, plus `diag` on the diagonal.
SpMat face_family_operator(int mx, int my, double hx, double hy, double coeff,
                           double diag) {
  const int n = mx * my;
  std::vector<Trip> trips;
  trips.reserve(static_cast<size_t>(n) * 5);
  for (int k = 0; k < n; ++k) trips.emplace_back(k, k, diag);
  if (coeff > 0.0) {
    const double wx = coeff / (hx * hx), wy = coeff / (hy * hy);
    for (int j = 0; j < my; ++j) {
      for (int i = 0; i + 1 < mx; ++i) {
        const int a = j * mx + i, b = a + 1;
        trips.emplace_back(a, a, wx);
        trips.emplace_back(b, b, wx);
        trips.emplace_back(a, b, -wx);
        trips.emplace_back(b, a, -wx);
      }
    }
    for (int j = 0; j + 1 < my; ++j) {
      for (int i = 0; i < mx; ++i) {
        const int a = j * mx + i, b = a + mx;
        trips.emplace_back(a, a, wy);
        trips.emplace_back(b, b, wy);
        trips.emplace_back(a, b, -wy);
        trips.emplace_back(b, a, -wy);
      }
    }
  }
  SpMat A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

// Cached factorizations for the implicit decay/diffusion half step. The
// matrices depend only on the grid, dt, tau and D^2, so one factorization
// serves the whole time loop.
struct TransportWork {
  Eigen::SimplicialLDLT<SpMat> x1_solver, x2_solver;
  bool diagonal = false;  // diffusion2 == 0: division by (1 + dt tau)
  double shrink = 1.0;

  void prepare(const ContinuumGrid& g, const ContinuumParams& p, double dt) {
    shrink = 1.0 / (1.0 + dt * p.tau);
    if (p.diffusion2 == 0.0) {
      diagonal = true;
      return;
    }
    diagonal = false;
    const double diag = 1.0 + dt * p.tau, coeff = dt * p.diffusion2;
    x1_solver.compute(
        face_family_operator(g.nx + 1, g.ny, g.hx(), g.hy(), coeff, diag));
    x2_solver.compute(
        face_family_operator(g.nx, g.ny + 1, g.hx(), g.hy(), coeff, diag));
    if (x1_solver.info() != Eigen::Success ||
        x2_solver.info() != Eigen::Success) {
      throw SingularSystemError(
          "factorization of the activity diffusion operator failed");
    }
  }
};

// Explicit growth followed by the prepared implicit solve. Throws when the
// explicit increment exceeds 10x the current value on any face that is
// already active, the signature of a far-too-large dt.
void transport_step_impl(ContinuumField& field, const ContinuumParams& p,
                         double dt, const TransportWork& work) {
  const ContinuumGrid& g = field.grid;
  Eigen::VectorXd g1, g2;
  face_gradients(g, field.a, g1, g2);

  const double ce = p.kappa - p.gamma;
  auto grow = [&](Eigen::VectorXd& X, const Eigen::VectorXd& grad,
                  const char* name) {
    for (int k = 0; k < X.size(); ++k) {
      const double inc =
          dt * clamped_pow(std::abs(grad[k]), p.kappa) * clamped_pow(X[k], ce);
      if (X[k] > 0.0 && inc > 10.0 * X[k]) {
        std::ostringstream msg;
        msg << "explicit activity growth overran the step on " << name
            << " face " << k << " (increment " << inc << " vs value " << X[k]
            << "); reduce dt";
        throw IntegrationError(msg.str());
      }
      X[k] += inc;
    }
  };
  grow(field.X1, g1, "x");
  grow(field.X2, g2, "y");

  if (work.diagonal) {
    field.X1 *= work.shrink;
    field.X2 *= work.shrink;
  } else {
    field.X1 = work.x1_solver.solve(field.X1);
    field.X2 = work.x2_solver.solve(field.X2);
  }
  check_finite(field.X1, "X1");
  check_finite(field.X2, "X2");
}

std::vector<std::string> growth_window_warnings(const ContinuumParams& p) {
  std::vector<std::string> out;
  const double d = p.kappa - p.gamma;
  if (d <= 0.0) {
    out.push_back(
        "kappa <= gamma: the activity growth exponent is nonpositive and the "
        "zero-activity state is repelling; results may be stiff");
  } else if (d > 1.0) {
    out.push_back(
        "kappa - gamma > 1 leaves the window (0, 1] where global existence "
        "of the network model is established");
  }
  return out;
}

}  // namespace

void ContinuumGrid::validate() const {
  if (nx < 2 || ny < 2) {
    throw GeometryError("continuum grid needs nx >= 2 and ny >= 2");
  }
  if (bbox.degenerate()) {
    throw GeometryError("continuum grid bounding box is degenerate");
  }
}

void ContinuumParams::validate(const ContinuumGrid& grid,
                               bool need_positive_I) const {
  grid.validate();
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw ConfigError("delta must be positive and finite");
  if (!(kappa >= 0.0) || !std::isfinite(kappa))
    throw ConfigError("kappa must be nonnegative and finite");
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw ConfigError("tau must be positive and finite");
  if (!(diffusion2 >= 0.0) || !std::isfinite(diffusion2))
    throw ConfigError("diffusion2 must be nonnegative and finite");
  if (S.size() != grid.cells())
    throw DimensionError("S must have one entry per grid cell");
  if (I.size() != grid.cells())
    throw DimensionError("I must have one entry per grid cell");
  if (!S.allFinite() || !I.allFinite())
    throw ConfigError("S and I must be finite");
  if ((I.array() < 0.0).any())
    throw ConfigError("I must be nonnegative");
  if (need_positive_I && (I.array() <= 0.0).any()) {
    throw ConfigError(
        "the quasi-static concentration solve needs I > 0 in every cell; "
        "use the parabolic scheme or add a uniform removal rate");
  }
}

Eigen::VectorXd solve_elliptic(const ContinuumGrid& grid,
                               const ContinuumParams& p,
                               const Eigen::VectorXd& X1,
                               const Eigen::VectorXd& X2) {
  p.validate(grid, /*need_positive_I=*/true);
  if (X1.size() != grid.xfaces() || X2.size() != grid.yfaces())
    throw DimensionError("face activity vectors do not match the grid");
  const double vol = grid.cell_volume();
  const SpMat A =
      assemble_cell_operator(grid, p.delta, X1, X2, (p.I.array() * vol));
  Eigen::SimplicialLDLT<SpMat> solver(A);
  if (solver.info() != Eigen::Success)
    throw SingularSystemError("quasi-static concentration solve failed");
  Eigen::VectorXd a = solver.solve(p.S * vol);
  check_finite(a, "a");
  return a;
}

void step_transport(ContinuumField& field, const ContinuumParams& p,
                    double dt) {
  p.validate(field.grid, /*need_positive_I=*/false);
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw ConfigError("dt must be positive and finite");
  TransportWork work;
  work.prepare(field.grid, p, dt);
  transport_step_impl(field, p, dt, work);
}

ContinuumResult run_continuum(const ContinuumGrid& grid,
                              const ContinuumParams& p,
                              const Eigen::VectorXd& X1_0,
                              const Eigen::VectorXd& X2_0, double dt,
                              double t_max, ContinuumScheme scheme,
                              double steady_tol, int snapshot_every,
                              const Eigen::VectorXd* a0) {
  const bool quasi_static = scheme == ContinuumScheme::EllipticParabolic;
  p.validate(grid, /*need_positive_I=*/quasi_static);
  if (X1_0.size() != grid.xfaces() || X2_0.size() != grid.yfaces())
    throw DimensionError("initial face activities do not match the grid");
  if ((X1_0.array() < 0.0).any() || (X2_0.array() < 0.0).any())
    throw ConfigError("initial activities must be nonnegative");
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw ConfigError("dt must be positive and finite");
  if (!(t_max >= 0.0) || !std::isfinite(t_max))
    throw ConfigError("t_max must be nonnegative and finite");
  if (!std::isfinite(steady_tol))
    throw ConfigError("steady_tol must be finite");
  if (snapshot_every < 0) throw ConfigError("snapshot_every must be >= 0");

  ContinuumResult result;
  result.warnings = growth_window_warnings(p);

  ContinuumField field{grid, Eigen::VectorXd(), X1_0, X2_0};
  if (a0 != nullptr) {
    if (a0->size() != grid.cells())
      throw DimensionError("initial concentration does not match the grid");
    field.a = *a0;
  } else {
    field.a = solve_elliptic(grid, p, field.X1, field.X2);
  }

  TransportWork work;
  work.prepare(grid, p, dt);
  const double vol = grid.cell_volume();

  double t = 0.0;
  long step = 0;
  result.times.push_back(t);
  if (quasi_static) field.a = solve_elliptic(grid, p, field.X1, field.X2);
  result.snapshots.push_back(field);

  // The final partial step reuses the factorization prepared for the full
  // dt only when the remainder matches; otherwise a fresh one is built.
  while (t < t_max - 1e-12 * std::max(1.0, t_max)) {
    double h = std::min(dt, t_max - t);
    const TransportWork* active = &work;
    TransportWork partial;
    if (h < dt * (1.0 - 1e-12)) {
      partial.prepare(grid, p, h);
      active = &partial;
    }

    if (quasi_static) {
      field.a = solve_elliptic(grid, p, field.X1, field.X2);
    } else {
      // Backward Euler on the concentration with activities frozen at the
      // start of the step.
      Eigen::VectorXd diag = vol * (1.0 + h * p.I.array());
      const SpMat A =
          assemble_cell_operator(grid, h * p.delta, field.X1, field.X2, diag);
      Eigen::SimplicialLDLT<SpMat> solver(A);
      if (solver.info() != Eigen::Success)
        throw SingularSystemError("implicit concentration step failed");
      // The rhs must be materialized before the solve: Eigen evaluates the
      // permuted solve lazily against the rhs expression, so letting it
      // reference field.a while field.a is overwritten scrambles the result.
      const Eigen::VectorXd rhs = vol * (field.a + h * p.S);
      field.a = solver.solve(rhs);
      check_finite(field.a, "a");
    }

    const Eigen::VectorXd x1_prev = field.X1, x2_prev = field.X2;
    transport_step_impl(field, p, h, *active);
    t += h;
    ++step;

    const double rate =
        std::max((field.X1 - x1_prev).lpNorm<Eigen::Infinity>(),
                 (field.X2 - x2_prev).lpNorm<Eigen::Infinity>()) /
        h;
    const double scale = std::max(
        1.0, std::max(field.X1.lpNorm<Eigen::Infinity>(),
                      field.X2.lpNorm<Eigen::Infinity>()));
    const bool steady = steady_tol > 0.0 && rate <= steady_tol * scale;
    const bool last = steady || t >= t_max - 1e-12 * std::max(1.0, t_max);

    if (last || (snapshot_every > 0 && step % snapshot_every == 0)) {
      if (quasi_static) field.a = solve_elliptic(grid, p, field.X1, field.X2);
      result.times.push_back(t);
      result.snapshots.push_back(field);
    }
    if (steady) {
      result.steady = true;
      result.steady_time = t;
      break;
    }
  }
  return result;
}

PLaplacianResult p_laplacian_steady(const ContinuumGrid& grid,
                                    const ContinuumParams& p, double tol,
                                    int max_iter) {
  p.validate(grid, /*need_positive_I=*/true);
  if (!(tol > 0.0)) throw ConfigError("tol must be positive");
  if (max_iter < 1) throw ConfigError("max_iter must be >= 1");

  PLaplacianResult result;
  if (p.kappa >= (p.gamma + 4.0) / 3.0) {
    result.warnings.push_back(
        "kappa >= (gamma + 4) / 3: outside the exponent range where the "
        "steady limit problem is known to be well posed in two dimensions");
  }

  const double vol = grid.cell_volume();
  const double hx = grid.hx(), hy = grid.hy();
  const double cp = p.delta / (p.tau * (p.kappa + 2.0));

  // Objective, gradient and face weights all reuse the same face sweep.
  auto objective = [&](const Eigen::VectorXd& a) {
    Eigen::VectorXd g1, g2;
    face_gradients(grid, a, g1, g2);
    double f = 0.0;
    for (int k = 0; k < g1.size(); ++k)
      f += cp * std::pow(std::abs(g1[k]), p.kappa + 2.0) * vol;
    for (int k = 0; k < g2.size(); ++k)
      f += cp * std::pow(std::abs(g2[k]), p.kappa + 2.0) * vol;
    for (int c = 0; c < grid.cells(); ++c)
      f += vol * (0.5 * p.I[c] * a[c] * a[c] - p.S[c] * a[c]);
    return f;
  };

  auto gradient = [&](const Eigen::VectorXd& a) {
    Eigen::VectorXd g1, g2;
    face_gradients(grid, a, g1, g2);
    Eigen::VectorXd grad = vol * (p.I.array() * a.array() - p.S.array());
    const double fx = p.delta / p.tau * vol / hx;
    for (int j = 0; j < grid.ny; ++j) {
      for (int i = 1; i < grid.nx; ++i) {
        const double g = g1[grid.xface(i, j)];
        const double t = fx * clamped_pow(std::abs(g), p.kappa) * g;
        grad[grid.cell(i, j)] += t;
        grad[grid.cell(i - 1, j)] -= t;
      }
    }
    const double fy = p.delta / p.tau * vol / hy;
    for (int j = 1; j < grid.ny; ++j) {
      for (int i = 0; i < grid.nx; ++i) {
        const double g = g2[grid.yface(i, j)];
        const double t = fy * clamped_pow(std::abs(g), p.kappa) * g;
        grad[grid.cell(i, j)] += t;
        grad[grid.cell(i, j - 1)] -= t;
      }
    }
    return grad;
  };

  // Warm start from the kappa = 0 problem, the linear solve with uniform
  // face weights delta / tau.
  Eigen::VectorXd a;
  {
    ContinuumParams lin = p;
    lin.kappa = 0.0;
    Eigen::VectorXd ones1 = Eigen::VectorXd::Constant(grid.xfaces(), 1.0 / p.tau);
    Eigen::VectorXd ones2 = Eigen::VectorXd::Constant(grid.yfaces(), 1.0 / p.tau);
    a = solve_elliptic(grid, lin, ones1, ones2);
  }

  const double gscale = vol * std::max(1.0, p.S.lpNorm<Eigen::Infinity>());
  double f_cur = objective(a);
  result.objective.push_back(f_cur);

  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd grad = gradient(a);
    const double gnorm = grad.lpNorm<Eigen::Infinity>();
    result.grad_norm.push_back(gnorm);
    if (gnorm <= tol * gscale) {
      result.converged = true;
      break;
    }
    // Relaxed scale used by the stagnation exits below: once rounding stops
    // the objective from decreasing, sqrt(tol) on the gradient is the best
    // certificate still available.
    const bool near_floor = gnorm <= std::sqrt(tol) * gscale;

    // Newton direction from the face-weighted Laplacian plus the volume
    // identity block; always SPD because I > 0.
    Eigen::VectorXd g1, g2;
    face_gradients(grid, a, g1, g2);
    Eigen::VectorXd w1(grid.xfaces()), w2(grid.yfaces());
    const double hess_coeff = p.delta / p.tau * (p.kappa + 1.0);
    for (int k = 0; k < g1.size(); ++k)
      w1[k] = hess_coeff * clamped_pow(std::abs(g1[k]), p.kappa);
    for (int k = 0; k < g2.size(); ++k)
      w2[k] = hess_coeff * clamped_pow(std::abs(g2[k]), p.kappa);
    const SpMat H =
        assemble_cell_operator(grid, 1.0, w1, w2, (vol * p.I.array()));
    Eigen::SimplicialLDLT<SpMat> solver(H);
    if (solver.info() != Eigen::Success)
      throw SingularSystemError("steady-state Newton system factorization failed");
    const Eigen::VectorXd dir = solver.solve(-grad);

    // Armijo backtracking; the functional is convex so full steps are the
    // common case away from kinks of |g|^kappa near kappa < 1.
    const double slope = grad.dot(dir);
    double stepsz = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      const double f_new = objective(a + stepsz * dir);
      if (f_new <= f_cur + 1e-4 * stepsz * slope) {
        a += stepsz * dir;
        f_cur = f_new;
        accepted = true;
        break;
      }
      stepsz *= 0.5;
    }
    if (!accepted) {
      if (near_floor)
        result.converged = true;
      else
        result.warnings.push_back(
            "line search stalled before reaching the gradient tolerance");
      break;
    }
    const double f_prev = result.objective.back();
    result.objective.push_back(f_cur);
    result.iterations = it + 1;
    if (near_floor &&
        f_prev - f_cur <=
            4.0 * std::numeric_limits<double>::epsilon() *
                std::max(1.0, std::abs(f_cur))) {
      result.converged = true;
      break;
    }
  }

  Eigen::VectorXd g1, g2;
  face_gradients(grid, a, g1, g2);
  result.a = a;
  result.X1.resize(grid.xfaces());
  result.X2.resize(grid.yfaces());
  for (int k = 0; k < g1.size(); ++k)
    result.X1[k] = clamped_pow(std::abs(g1[k]), p.kappa) / p.tau;
  for (int k = 0; k < g2.size(); ++k)
    result.X2[k] = clamped_pow(std::abs(g2[k]), p.kappa) / p.tau;
  // Boundary faces carry zero gradient by construction; keep their activity
  // at zero rather than the 0^0 = 1 convention.
  for (int j = 0; j < grid.ny; ++j) {
    result.X1[grid.xface(0, j)] = 0.0;
    result.X1[grid.xface(grid.nx, j)] = 0.0;
  }
  for (int i = 0; i < grid.nx; ++i) {
    result.X2[grid.yface(i, 0)] = 0.0;
    result.X2[grid.yface(i, grid.ny)] = 0.0;
  }
  return result;
}

}  // namespace auxinet
