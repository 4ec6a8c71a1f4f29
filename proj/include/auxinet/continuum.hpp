#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "auxinet/graph.hpp"

namespace auxinet {

// Cell-centered finite-volume grid with activities on faces: a lives at the
// nx*ny cell centers, X1 on the (nx+1)*ny x-faces, X2 on the nx*(ny+1)
// y-faces. Boundary faces are zero-flux by construction. Indices are
// row-major with i the x index.
struct ContinuumGrid {
  int nx = 32;
  int ny = 32;
  BBox bbox{0.0, 0.0, 1.0, 1.0};

  double hx() const { return bbox.width() / nx; }
  double hy() const { return bbox.height() / ny; }
  double cell_volume() const { return hx() * hy(); }
  int cells() const { return nx * ny; }
  int xfaces() const { return (nx + 1) * ny; }
  int yfaces() const { return nx * (ny + 1); }
  int cell(int i, int j) const { return j * nx + i; }
  int xface(int i, int j) const { return j * (nx + 1) + i; }
  int yface(int i, int j) const { return j * nx + i; }
  double cell_x(int i) const { return bbox.xmin + (i + 0.5) * hx(); }
  double cell_y(int j) const { return bbox.ymin + (j + 0.5) * hy(); }

  void validate() const;
};

struct ContinuumParams {
  double delta = 1.0;       // transport coefficient in the a equation
  double kappa = 2.0;       // flux feedback exponent
  double gamma = 0.5;       // metabolic exponent
  double tau = 1.0;         // activity decay rate
  double diffusion2 = 1e-2; // D^2, spatial coupling of the activity fields
  Eigen::VectorXd S;        // per cell
  Eigen::VectorXd I;        // per cell

  void validate(const ContinuumGrid& grid, bool need_positive_I) const;
};

struct ContinuumField {
  ContinuumGrid grid;
  Eigen::VectorXd a;   // cells
  Eigen::VectorXd X1;  // x-faces
  Eigen::VectorXd X2;  // y-faces
};

// Quasi-static concentration: -delta div(X grad a) + I a = S with zero-flux
// boundaries, discretized with face-wise harmonic-free (direct) activity
// weights. Requires I > 0 everywhere so the operator is definite even where
// the activity vanishes.
Eigen::VectorXd solve_elliptic(const ContinuumGrid& grid,
                               const ContinuumParams& p,
                               const Eigen::VectorXd& X1,
                               const Eigen::VectorXd& X2);

// One transport step of size dt, reading gradients from field.a:
//   1. explicit growth   X += dt |grad_k a|^kappa X^{kappa-gamma}
//   2. implicit decay + diffusion   (1 + dt tau) X - dt D^2 lap X = X*
// Step 2 is an M-matrix solve, so min X_{n+1} >= min X_n * (1 + dt tau)^-1
// and the exponential positivity floor min(X0) e^{-tau t} survives
// discretely. Throws IntegrationError when the explicit growth outruns the
// step (relative increment > 10), a sign dt is far too large.
void step_transport(ContinuumField& field, const ContinuumParams& p,
                    double dt);

enum class ContinuumScheme {
  EllipticParabolic,   // a solved quasi-statically every step
  ParabolicParabolic,  // backward-Euler step on a as well
};

struct ContinuumResult {
  std::vector<double> times;
  std::vector<ContinuumField> snapshots;
  bool steady = false;
  double steady_time = 0.0;
  std::vector<std::string> warnings;

  const ContinuumField& final_field() const { return snapshots.back(); }
};

// Fixed-step time loop. The activity fields start from X1_0/X2_0; for the
// parabolic scheme a starts from a0 when given, else from one quasi-static
// solve. Halts early when the activity rate ||dX||_inf / dt drops below
// steady_tol * max(1, ||X||_inf); steady_tol <= 0 disables the early exit.
// snapshot_every = 0 records only the initial and final fields.
ContinuumResult run_continuum(const ContinuumGrid& grid,
                              const ContinuumParams& p,
                              const Eigen::VectorXd& X1_0,
                              const Eigen::VectorXd& X2_0, double dt,
                              double t_max, ContinuumScheme scheme,
                              double steady_tol = 1e-8,
                              int snapshot_every = 10,
                              const Eigen::VectorXd* a0 = nullptr);

// Steady state for the borderline kappa = gamma regime via the strictly
// convex functional
//   F[a] = delta/(tau (kappa+2)) sum_k int |d_k a|^{kappa+2}
//          + int (I a^2 / 2 - S a)
// minimized by damped Newton with Armijo backtracking; afterwards
// X_k = tau^{-1} |d_k a|^kappa. Needs I > 0 so the quadratic part keeps the
// Hessian definite. Warns (in the result) when kappa >= (gamma+4)/3, outside
// the regime where the limit system is known to be well-posed in 2d.
struct PLaplacianResult {
  Eigen::VectorXd a;
  Eigen::VectorXd X1;
  Eigen::VectorXd X2;
  std::vector<double> objective;  // after each accepted iterate
  std::vector<double> grad_norm;
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> warnings;
};

PLaplacianResult p_laplacian_steady(const ContinuumGrid& grid,
                                    const ContinuumParams& p,
                                    double tol = 1e-10, int max_iter = 100);

}  // namespace auxinet
