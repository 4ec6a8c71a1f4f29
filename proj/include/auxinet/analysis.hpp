#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "auxinet/dynamics.hpp"
#include "auxinet/graph.hpp"
#include "auxinet/ode.hpp"

#include "json.hpp"

namespace auxinet {

// Flux balance of the generalized radius law at a steady state of the
// transport-activity model. At every vertex with I_i = 0,
//
//   delta * sum_{inflow edges} (tau X^{gamma+1})^{1/kappa} + S_i
//     = delta * sum_{outflow edges} (tau X^{gamma+1})^{1/kappa},
//
// where inflow/outflow is decided by the sign of the actual flux
// X (a_j - a_i) / L. The per-edge identity |Q|^kappa = tau X^{gamma+1}
// (every non-pruned edge at equilibrium) is audited alongside.
struct MurrayReport {
  Eigen::VectorXd vertex_residual;  // absolute; NaN at skipped vertices
  Eigen::VectorXd vertex_relative;  // residual / local flux scale
  double max_relative = 0.0;
  double max_absolute = 0.0;
  std::vector<int> skipped;     // vertices with I_i != 0
  double max_edge_relative = 0.0;
  int edges_below_floor = 0;    // too little flux/activity to rate
  bool input_was_steady = true;
  std::vector<std::string> notes;

  nlohmann::json to_json() const;
};

MurrayReport murray_residual(const Graph& g, const ModelParams& p,
                             const NetworkState& st,
                             bool input_was_steady = true);

// Trajectory audit of the invariants the transport-activity model is proven
// to keep: X >= 0, a > 0, and, for source-free runs, sup_t a_i(t) bounded by
// alpha = sqrt(sum_i a_i(0)^2).
struct BoundReport {
  double alpha = 0.0;
  bool source_free = false;
  double min_a = 0.0;
  double max_a = 0.0;
  double min_x = 0.0;
  std::vector<std::string> violations;
  // Informational only: vertices resting at zero behind zero-activity edges.
  std::vector<std::string> notes;

  bool pass() const { return violations.empty(); }
  nlohmann::json to_json() const;
};

BoundReport check_bounds(const Graph& g, const ModelParams& p,
                         const SimulationResult& run);

// Network energy along a conductivity trajectory; the adaptation law is a
// constrained gradient flow when nu = tau^2, so the sequence must be
// non-increasing up to solver tolerance.
struct EnergyReport {
  std::vector<double> energy;
  double max_increase = 0.0;  // most positive forward difference
  double tolerance = 0.0;
  bool monotone = true;

  nlohmann::json to_json() const;
};

EnergyReport energy_dissipation(const Graph& g, const ModelParams& p,
                                const SimulationResult& run,
                                double rtol = 1e-6);

// Largest relative mismatch of the state under the mirror permutation of
// the graph: max over mirrored vertex pairs and edge pairs, normalized by
// the largest field magnitude. Throws GeometryError when the graph itself
// is not symmetric under the axis.
double symmetry_error(const Graph& g, const NetworkState& st,
                      ReflectionAxis axis);

// Number of edges whose activity reaches the threshold: a blunt but
// monotone gauge of how far the reinforced pattern extends.
int pattern_extent(const NetworkState& st, double threshold);

// Jaccard overlap of the top-quartile vertex sets of (a) concentration and
// (b) strongest incident edge activity. High overlap means veins sit where
// the concentration ridge is.
double high_region_overlap(const Graph& g, const NetworkState& st);

}  // namespace auxinet
