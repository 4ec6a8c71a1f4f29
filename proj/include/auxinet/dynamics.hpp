#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "auxinet/graph.hpp"

namespace auxinet {

enum class ModelKind { Primary, HuCai, Mitchison };

// Parameter block shared by the three cell-grid models. Fields a model does
// not use are ignored by its right-hand side (validate_params warns when
// that looks unintentional).
struct ModelParams {
  double delta = 1.0;       // transport rate in the concentration equation
  double sigma = 1.0;       // adaptation rate of the transport activity
  double kappa = 2.0;       // flux feedback exponent
  double gamma = 0.5;       // metabolic exponent
  double tau = 1.0;         // activity decay rate
  double nu = 1.0;          // metabolic coefficient in the network energy
  double cell_volume = 1.0; // v in the signal model
  double relax_rate = 1.0;  // rho in the signal-model capacity update
  Eigen::VectorXd S;        // per-vertex production / injection / signal source
  Eigen::VectorXd I;        // per-vertex removal rate (concentration model)
  Eigen::VectorXd wall_area;  // per-edge interface area (signal model); empty = 1
};

// Throws ConfigError / DimensionError / ConservationError on hard problems,
// returns human-readable warnings for legal-but-delicate regimes.
std::vector<std::string> validate_params(const Graph& g, const ModelParams& p,
                                         ModelKind kind);

// Vertex field plus edge field at a moment in time. The fields are
// concentration/activity for the primary model, pressure/conductivity for
// the Hu-Cai model and signal/diffusivity for the signal model.
struct NetworkState {
  double t = 0.0;
  Eigen::VectorXd a;
  Eigen::VectorXd X;
};

// coeff_e * (u_j - u_i) / L_e on every canonical (i < j) edge. Positive
// values move material toward the lower-id endpoint; flip the sign for the
// opposite orientation.
Eigen::VectorXd edge_gradient_flux(const Graph& g,
                                   const Eigen::VectorXd& coeff,
                                   const Eigen::VectorXd& u);

// d(a)/dt and d(X)/dt of the transport-activity model:
//   da_i = S_i - I_i a_i + delta sum_j X_ij (a_j - a_i) / L_ij
//   dX_e = sigma (|Q_e|^kappa / X_e^{gamma+1} - tau) X_e L_e
// with the growth term evaluated in the 0/0-safe form
// (|a_j - a_i| / L)^kappa * X^{kappa-gamma}, which extends continuously to
// X = 0 when kappa > gamma. Negative X (off-manifold Newton iterates) is
// clamped to 0 inside the fractional powers only.
void primary_rhs(const Graph& g, const ModelParams& p,
                 const Eigen::VectorXd& a, const Eigen::VectorXd& X,
                 Eigen::VectorXd& da, Eigen::VectorXd& dX);

// Sparse Jacobian of primary_rhs in the packed ordering [a; X].
void primary_jacobian(const Graph& g, const ModelParams& p,
                      const Eigen::VectorXd& a, const Eigen::VectorXd& X,
                      std::vector<Eigen::Triplet<double>>& out);

// Pressures for conductivities C (clamped at 0 before the potential solve),
// plus optionally the achieved linear-solve residual.
Eigen::VectorXd hu_cai_pressure(const Graph& g, const ModelParams& p,
                                const Eigen::VectorXd& C,
                                double* residual = nullptr);

// dC_e = sigma (Q_e^2 / C_e^{gamma+1} - tau^2) C_e L_e with Q from the
// Kirchhoff pressures. The decay coefficient enters squared, matching the
// kappa = 2 special case of the primary law.
void hu_cai_rhs(const Graph& g, const ModelParams& p,
                const Eigen::VectorXd& C, Eigen::VectorXd& dC,
                double* residual = nullptr);

// Pumping plus metabolic cost sum_e (Q_e^2 / C_e + (nu/gamma) C_e^gamma) L_e.
// The adaptation law above is the constrained gradient flow of this energy
// when nu = tau^2. Edges with C_e = 0 carry no flow and contribute only
// their (zero) metabolic term.
double network_energy(const Graph& g, const ModelParams& p,
                      const Eigen::VectorXd& C);

// Signal model:
//   ds_i = S_i + (1/v) sum_j A_ij D_ij (s_j - s_i) / L_ij
//   dD_e = rho (max(phi_e, 0)^2 - D_e),  phi_e = D_e (s_i - s_j) / L_e
// phi is oriented along the canonical edge direction (low id to high id),
// so capacity only builds on edges transporting that way; this is the
// polar-update variant with a first-order relaxation toward phi^2.
void mitchison_rhs(const Graph& g, const ModelParams& p,
                   const Eigen::VectorXd& s, const Eigen::VectorXd& D,
                   Eigen::VectorXd& ds, Eigen::VectorXd& dD);

}  // namespace auxinet
