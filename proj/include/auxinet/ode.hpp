#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <limits>
#include <string>
#include <vector>

namespace auxinet {

struct IntegratorConfig {
  double rtol = 1e-6;
  double atol = 1e-9;
  int max_order = 5;   // variable-order 1..max_order
  double first_step = 0.0;  // 0 picks a size from the initial derivative
  double max_step = std::numeric_limits<double>::infinity();
  double t_max = 1e6;
  // Early halt once ||f||_inf <= steady_tol * max(1, ||y||_inf); <= 0 keeps
  // integrating to t_max.
  double steady_tol = 1e-8;
  int snapshot_every = 1;  // record every k-th accepted step; 0 = ends only

  void validate() const;  // ConfigError on out-of-range values
};

struct IntegrationStats {
  long steps = 0;        // accepted
  long rejected = 0;     // error-test, Newton and guard rejections
  long rhs_evals = 0;
  long jacobians = 0;
  long factorizations = 0;
};

struct SimulationResult {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  bool steady = false;
  double steady_time = std::numeric_limits<double>::quiet_NaN();
  // Absolute tolerance the run was produced with, so downstream checks can
  // tell integrator-resolution artifacts from real bound violations. Zero
  // for hand-built trajectories, which makes those checks strict.
  double atol = 0.0;
  IntegrationStats stats;
  std::vector<std::string> events;    // guard clamps, pinned components
  std::vector<std::string> warnings;  // filled by callers (param validation)

  const Eigen::VectorXd& final_state() const { return states.back(); }
  double final_time() const { return times.back(); }
};

// Stiff initial-value problem dy/dt = f(t, y). Implementations provide the
// right-hand side and optionally an analytic Jacobian; the default Jacobian
// falls back to forward differences, which is plenty for the small systems
// here but costs size() extra rhs evaluations per refresh.
class OdeSystem {
 public:
  virtual ~OdeSystem() = default;

  virtual int size() const = 0;
  virtual void rhs(double t, const Eigen::VectorXd& y,
                   Eigen::VectorXd& f) const = 0;
  virtual void jacobian(double t, const Eigen::VectorXd& y,
                        Eigen::SparseMatrix<double>& jac) const;

  // Components that must stay nonnegative. The stepper rejects steps that
  // take one below -atol and clamps tiny undershoots to 0.
  virtual const std::vector<char>& nonneg_mask() const;

  // Subset of the nonneg components for which exactly 0 is invariant
  // (absorbing). Once such a component reaches 0 it is pinned there and
  // dropped from the Newton systems, which keeps fractional-power Jacobians
  // finite.
  virtual const std::vector<char>& absorbing_mask() const;

  // One-line description of component k for diagnostics ("X[3-7]").
  virtual std::string component_name(int k) const;

  // Extra context appended to integration failure messages.
  virtual std::string failure_hint(double t, const Eigen::VectorXd& y) const;
};

// Variable-order (1..5) implicit multistep integration with quasi-constant
// step sizes, modified Newton iterations and the nonnegativity guard
// described above. Order 1 is exactly the implicit Euler step.
SimulationResult integrate(const OdeSystem& sys, double t0,
                           const Eigen::VectorXd& y0,
                           const IntegratorConfig& cfg);

// ||f(t, y)||_inf <= tol * max(1, ||y||_inf)?
bool at_steady_state(const OdeSystem& sys, double t, const Eigen::VectorXd& y,
                     double tol);

}  // namespace auxinet
