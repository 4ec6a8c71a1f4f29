#include "auxinet/dynamics.hpp"

#include <cmath>
#include <string>

#include "auxinet/errors.hpp"
#include "auxinet/kirchhoff.hpp"

namespace auxinet {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

void check_field(const Eigen::VectorXd& v, int expect, const char* name) {
  if (v.size() != expect)
    throw DimensionError(std::string(name) + " has size " +
                         std::to_string(v.size()) + ", expected " +
                         std::to_string(expect));
  if (!v.allFinite())
    throw ConfigError(std::string(name) + " contains non-finite entries");
}

double clamped_pow(double x, double e) {
  // Fractional powers of conductance-like quantities; negative bases only
  // occur on off-manifold Newton iterates and are treated as 0.
  if (x <= 0.0) {
    if (e > 0.0) return 0.0;
    if (e == 0.0) return 1.0;
    return 0.0;  // singular limit; the step guard keeps real states away
  }
  return std::pow(x, e);
}

}  // namespace

std::vector<std::string> validate_params(const Graph& g, const ModelParams& p,
                                         ModelKind kind) {
  std::vector<std::string> warnings;
  const int n = g.vertex_count();
  const int m = g.edge_count();

  require(std::isfinite(p.sigma) && p.sigma >= 0.0, "sigma must be >= 0");
  require(std::isfinite(p.tau) && p.tau >= 0.0, "tau must be >= 0");
  require(std::isfinite(p.gamma) && p.gamma > 0.0, "gamma must be > 0");

  switch (kind) {
    case ModelKind::Primary: {
      require(std::isfinite(p.delta) && p.delta > 0.0, "delta must be > 0");
      require(std::isfinite(p.kappa) && p.kappa >= 0.0, "kappa must be >= 0");
      check_field(p.S, n, "S");
      check_field(p.I, n, "I");
      require((p.S.array() >= 0.0).all(), "S must be nonnegative");
      require((p.I.array() >= 0.0).all(), "I must be nonnegative");
      const double window = p.kappa - p.gamma;
      if (!(window > 0.0) || window > 1.0)
        warnings.push_back(
            "kappa - gamma = " + std::to_string(window) +
            " lies outside (0, 1], where positivity and global existence "
            "are proven; integration proceeds on a best-effort basis");
      if (p.kappa <= p.gamma)
        warnings.push_back(
            "kappa <= gamma makes the activity growth term singular at "
            "X = 0; runs that drive an edge to zero will abort");
      break;
    }
    case ModelKind::HuCai: {
      check_field(p.S, n, "S");
      const double sum = p.S.sum();
      if (std::abs(sum) > 1e-12 * std::max(p.S.lpNorm<1>(), 1e-300))
        throw ConservationError(
            "injections must balance: sum(S) = " + std::to_string(sum));
      if (p.I.size() != 0 && p.I.lpNorm<1>() > 0.0)
        warnings.push_back("removal rates I are ignored by this model");
      break;
    }
    case ModelKind::Mitchison: {
      check_field(p.S, n, "S");
      require(std::isfinite(p.cell_volume) && p.cell_volume > 0.0,
              "cell_volume must be > 0");
      require(std::isfinite(p.relax_rate) && p.relax_rate >= 0.0,
              "relax_rate must be >= 0");
      if (p.wall_area.size() != 0) {
        check_field(p.wall_area, m, "wall_area");
        require((p.wall_area.array() > 0.0).all(),
                "wall_area must be positive");
      }
      if (std::abs(p.S.sum()) > 1e-12 * std::max(p.S.lpNorm<1>(), 1e-300))
        warnings.push_back(
            "net signal production is nonzero; total signal will drift");
      break;
    }
  }
  return warnings;
}

Eigen::VectorXd edge_gradient_flux(const Graph& g,
                                   const Eigen::VectorXd& coeff,
                                   const Eigen::VectorXd& u) {
  const int m = g.edge_count();
  if (coeff.size() != m) throw DimensionError("coeff size != edge count");
  if (u.size() != g.vertex_count())
    throw DimensionError("potential size != vertex count");
  Eigen::VectorXd q(m);
  for (int e = 0; e < m; ++e) {
    const Edge& ed = g.edges()[static_cast<std::size_t>(e)];
    q[e] = coeff[e] * (u[ed.j] - u[ed.i]) / ed.length;
  }
  return q;
}

void primary_rhs(const Graph& g, const ModelParams& p,
                 const Eigen::VectorXd& a, const Eigen::VectorXd& X,
                 Eigen::VectorXd& da, Eigen::VectorXd& dX) {
  const int n = g.vertex_count();
  const int m = g.edge_count();
  da = p.S - p.I.cwiseProduct(a);
  dX.resize(m);
  for (int e = 0; e < m; ++e) {
    const Edge& ed = g.edges()[static_cast<std::size_t>(e)];
    const double grad = (a[ed.j] - a[ed.i]) / ed.length;
    const double flow = X[e] * grad;
    da[ed.i] += p.delta * flow;
    da[ed.j] -= p.delta * flow;
    // |Q|^kappa / X^{gamma+1} * X  ==  |grad|^kappa * X^{kappa-gamma}
    const double growth =
        clamped_pow(std::abs(grad), p.kappa) * clamped_pow(X[e], p.kappa - p.gamma);
    dX[e] = p.sigma * (growth - p.tau * X[e]) * ed.length;
  }
  (void)n;
}

void primary_jacobian(const Graph& g, const ModelParams& p,
                      const Eigen::VectorXd& a, const Eigen::VectorXd& X,
                      std::vector<Eigen::Triplet<double>>& out) {
  const int n = g.vertex_count();
  out.clear();
  out.reserve(static_cast<std::size_t>(n) + 8 * g.edges().size());

  Eigen::VectorXd diag = -p.I;
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edges()[static_cast<std::size_t>(e)];
    const double invL = 1.0 / ed.length;
    const double w = p.delta * X[e] * invL;
    diag[ed.i] -= w;
    diag[ed.j] -= w;
    out.emplace_back(ed.i, ed.j, w);
    out.emplace_back(ed.j, ed.i, w);

    const double dgrad = p.delta * (a[ed.j] - a[ed.i]) * invL;
    out.emplace_back(ed.i, n + e, dgrad);
    out.emplace_back(ed.j, n + e, -dgrad);

    // Activity row: F = sigma L (|g|^k X^{k-g} - tau X).
    const double gabs = std::abs(a[ed.j] - a[ed.i]) * invL;
    const double sgn = a[ed.j] > a[ed.i] ? 1.0 : (a[ed.j] < a[ed.i] ? -1.0 : 0.0);
    const double xpow = clamped_pow(X[e], p.kappa - p.gamma - 1.0);
    double dFdX = p.sigma * ed.length *
                  ((p.kappa - p.gamma) * clamped_pow(gabs, p.kappa) * xpow -
                   p.tau);
    const double dFda =
        gabs > 0.0 ? p.sigma * p.kappa * clamped_pow(gabs, p.kappa - 1.0) *
                         sgn * clamped_pow(X[e], p.kappa - p.gamma)
                   : 0.0;
    out.emplace_back(n + e, n + e, dFdX);
    if (dFda != 0.0) {
      out.emplace_back(n + e, ed.j, dFda);
      out.emplace_back(n + e, ed.i, -dFda);
    }
  }
  for (int i = 0; i < n; ++i) out.emplace_back(i, i, diag[i]);
}

Eigen::VectorXd hu_cai_pressure(const Graph& g, const ModelParams& p,
                                const Eigen::VectorXd& C, double* residual) {
  // Clamp at zero: Newton iterates may probe slightly negative C, and the
  // potential solve requires nonnegative weights. The block solver keeps the
  // problem well-posed while adaptation prunes flow-less parts of the graph.
  Eigen::VectorXd cpos = C.cwiseMax(0.0);
  return kirchhoff_solve_blocks(g, cpos, p.S, 1e-12, residual);
}

void hu_cai_rhs(const Graph& g, const ModelParams& p,
                const Eigen::VectorXd& C, Eigen::VectorXd& dC,
                double* residual) {
  const Eigen::VectorXd P = hu_cai_pressure(g, p, C, residual);
  const int m = g.edge_count();
  dC.resize(m);
  for (int e = 0; e < m; ++e) {
    const Edge& ed = g.edges()[static_cast<std::size_t>(e)];
    const double grad = (P[ed.j] - P[ed.i]) / ed.length;
    // Q = C grad, so Q^2 / C^{gamma+1} * C == grad^2 * C^{2-gamma}.
    const double growth = grad * grad * clamped_pow(C[e], 2.0 - p.gamma);
    dC[e] = p.sigma * (growth - p.tau * p.tau * C[e]) * ed.length;
  }
}

double network_energy(const Graph& g, const ModelParams& p,
                      const Eigen::VectorXd& C) {
  const Eigen::VectorXd P = hu_cai_pressure(g, p, C);
  double energy = 0.0;
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edges()[static_cast<std::size_t>(e)];
    const double grad = (P[ed.j] - P[ed.i]) / ed.length;
    // Q^2 / C == grad^2 * C, finite for all C >= 0.
    const double pumping = grad * grad * std::max(C[e], 0.0);
    const double metabolic = p.nu / p.gamma * clamped_pow(C[e], p.gamma);
    energy += (pumping + metabolic) * ed.length;
  }
  return energy;
}

void mitchison_rhs(const Graph& g, const ModelParams& p,
                   const Eigen::VectorXd& s, const Eigen::VectorXd& D,
                   Eigen::VectorXd& ds, Eigen::VectorXd& dD) {
  const int m = g.edge_count();
  ds = p.S;
  dD.resize(m);
  const bool unit_area = p.wall_area.size() == 0;
  for (int e = 0; e < m; ++e) {
    const Edge& ed = g.edges()[static_cast<std::size_t>(e)];
    const double area = unit_area ? 1.0 : p.wall_area[e];
    const double phi = D[e] * (s[ed.i] - s[ed.j]) / ed.length;
    ds[ed.i] -= area * phi / p.cell_volume;
    ds[ed.j] += area * phi / p.cell_volume;
    const double pos = std::max(phi, 0.0);
    dD[e] = p.relax_rate * (pos * pos - D[e]);
  }
}

}  // namespace auxinet
