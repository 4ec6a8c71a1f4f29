#pragma once

#include <Eigen/Dense>

#include "auxinet/graph.hpp"

namespace auxinet {

// Vertex potentials P for edge conductivities `cond` and net injections `S`:
//
//   -sum_{j ~ i} cond_ij * (P_j - P_i) / L_ij = S_i,      sum_i P_i = 0.
//
// Preconditions: sum(S) = 0 within 1e-12 * ||S||_1, cond >= 0, and the
// subgraph of strictly positive conductivities connects all vertices.
// The relative residual ||L P - S|| <= rtol * ||S|| is verified after the
// solve (one iterative refinement pass is attempted first) and the measured
// value is written to residual_out when given.
Eigen::VectorXd kirchhoff_solve(const Graph& g, const Eigen::VectorXd& cond,
                                const Eigen::VectorXd& S,
                                double rtol = 1e-12,
                                double* residual_out = nullptr);

// Same system, but each component of the positive-conductivity subgraph is
// treated as an independent problem (potentials de-meaned per component).
// Needed while conductivity adaptation prunes edges: vertices that carry no
// flow detach without making the flow problem ill-posed. Injections must
// balance within every component, otherwise a source has lost its sink and
// the problem is genuinely singular.
Eigen::VectorXd kirchhoff_solve_blocks(const Graph& g,
                                       const Eigen::VectorXd& cond,
                                       const Eigen::VectorXd& S,
                                       double rtol = 1e-12,
                                       double* residual_out = nullptr);

}  // namespace auxinet
