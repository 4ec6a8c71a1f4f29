#include "auxinet/kirchhoff.hpp"

#include <Eigen/Sparse>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "auxinet/errors.hpp"

namespace auxinet {
namespace {

// L P with L the weighted graph Laplacian, assembled edge-by-edge so the
// residual check uses the same arithmetic as the problem statement.
Eigen::VectorXd apply_laplacian(const Graph& g, const Eigen::VectorXd& w,
                                const Eigen::VectorXd& p) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g.vertex_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edges()[static_cast<std::size_t>(e)];
    const double flow = w[e] * (p[ed.j] - p[ed.i]);
    out[ed.i] -= flow;
    out[ed.j] += flow;
  }
  return out;
}

Eigen::VectorXd solve_impl(const Graph& g, const Eigen::VectorXd& cond,
                           const Eigen::VectorXd& S, double rtol,
                           double* residual_out, bool allow_blocks) {
  const int n = g.vertex_count();
  const int m = g.edge_count();
  if (cond.size() != m)
    throw DimensionError("conductivity vector size != edge count");
  if (S.size() != n) throw DimensionError("source vector size != vertex count");
  for (int e = 0; e < m; ++e) {
    if (!(cond[e] >= 0.0) || !std::isfinite(cond[e]))
      throw ConfigError("conductivities must be nonnegative and finite");
  }
  const double s_l1 = S.lpNorm<1>();
  const double balance_tol = 1e-12 * std::max(s_l1, 1e-300);
  if (std::abs(S.sum()) > balance_tol)
    throw ConservationError("net source strength " + std::to_string(S.sum()) +
                            " is not zero; potentials are undefined");

  // Only strictly positive conductivities carry flow. Label the components
  // of that subgraph.
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  int n_comp = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[static_cast<std::size_t>(s)] >= 0) continue;
    std::queue<int> q;
    q.push(s);
    comp[static_cast<std::size_t>(s)] = n_comp;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (auto [w, e] : g.neighbors(v)) {
        if (cond[e] > 0.0 && comp[static_cast<std::size_t>(w)] < 0) {
          comp[static_cast<std::size_t>(w)] = n_comp;
          q.push(w);
        }
      }
    }
    ++n_comp;
  }
  if (!allow_blocks && n_comp > 1)
    throw SingularSystemError(
        "positive-conductivity subgraph splits into " +
        std::to_string(n_comp) + " components");
  if (allow_blocks) {
    Eigen::VectorXd comp_sum = Eigen::VectorXd::Zero(n_comp);
    for (int v = 0; v < n; ++v) comp_sum[comp[static_cast<std::size_t>(v)]] += S[v];
    for (int k = 0; k < n_comp; ++k) {
      if (std::abs(comp_sum[k]) > balance_tol)
        throw SingularSystemError(
            "a positive-conductivity component has unbalanced injections (" +
            std::to_string(comp_sum[k]) + "); a source lost its sink");
    }
  }

  if (s_l1 == 0.0) {
    if (residual_out) *residual_out = 0.0;
    return Eigen::VectorXd::Zero(n);
  }

  Eigen::VectorXd w(m);
  for (int e = 0; e < m; ++e)
    w[e] = cond[e] / g.edges()[static_cast<std::size_t>(e)].length;

  // Ground the first vertex of every component and solve the reduced SPD
  // system for the remaining ones.
  std::vector<int> reduced(static_cast<std::size_t>(n), -1);
  std::vector<char> grounded(static_cast<std::size_t>(n_comp), 0);
  int n_red = 0;
  for (int v = 0; v < n; ++v) {
    const int k = comp[static_cast<std::size_t>(v)];
    if (!grounded[static_cast<std::size_t>(k)]) {
      grounded[static_cast<std::size_t>(k)] = 1;
    } else {
      reduced[static_cast<std::size_t>(v)] = n_red++;
    }
  }

  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  if (n_red > 0) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(4 * m));
    for (int e = 0; e < m; ++e) {
      if (!(w[e] > 0.0)) continue;
      const Edge& ed = g.edges()[static_cast<std::size_t>(e)];
      const int ri = reduced[static_cast<std::size_t>(ed.i)];
      const int rj = reduced[static_cast<std::size_t>(ed.j)];
      if (ri >= 0) trip.emplace_back(ri, ri, w[e]);
      if (rj >= 0) trip.emplace_back(rj, rj, w[e]);
      if (ri >= 0 && rj >= 0) {
        trip.emplace_back(ri, rj, -w[e]);
        trip.emplace_back(rj, ri, -w[e]);
      }
    }
    Eigen::SparseMatrix<double> A(n_red, n_red);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(A);
    if (solver.info() != Eigen::Success)
      throw SingularSystemError("factorization of the potential system failed");

    Eigen::VectorXd b(n_red);
    for (int v = 0; v < n; ++v) {
      const int r = reduced[static_cast<std::size_t>(v)];
      if (r >= 0) b[r] = S[v];
    }
    Eigen::VectorXd x = solver.solve(b);
    for (int v = 0; v < n; ++v) {
      const int r = reduced[static_cast<std::size_t>(v)];
      p[v] = r >= 0 ? x[r] : 0.0;
    }

    auto residual_of = [&](const Eigen::VectorXd& pp) {
      return (apply_laplacian(g, w, pp) - S).norm();
    };
    const double target = rtol * S.norm();
    double res = residual_of(p);
    if (res > target) {
      // One pass of iterative refinement before giving up.
      const Eigen::VectorXd r_full = S - apply_laplacian(g, w, p);
      Eigen::VectorXd rb(n_red);
      for (int v = 0; v < n; ++v) {
        const int r = reduced[static_cast<std::size_t>(v)];
        if (r >= 0) rb[r] = r_full[v];
      }
      const Eigen::VectorXd dx = solver.solve(rb);
      for (int v = 0; v < n; ++v) {
        const int r = reduced[static_cast<std::size_t>(v)];
        if (r >= 0) p[v] += dx[r];
      }
      res = residual_of(p);
    }
    if (res > target)
      throw SingularSystemError("potential solve residual " +
                                std::to_string(res) + " exceeds tolerance " +
                                std::to_string(target));
    if (residual_out) *residual_out = res;
  } else if (residual_out) {
    *residual_out = 0.0;
  }

  // Zero mean within each component fixes the free constants.
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n_comp);
  Eigen::VectorXd count = Eigen::VectorXd::Zero(n_comp);
  for (int v = 0; v < n; ++v) {
    mean[comp[static_cast<std::size_t>(v)]] += p[v];
    count[comp[static_cast<std::size_t>(v)]] += 1.0;
  }
  for (int k = 0; k < n_comp; ++k) mean[k] /= count[k];
  for (int v = 0; v < n; ++v) p[v] -= mean[comp[static_cast<std::size_t>(v)]];
  return p;
}

}  // namespace

Eigen::VectorXd kirchhoff_solve(const Graph& g, const Eigen::VectorXd& cond,
                                const Eigen::VectorXd& S, double rtol,
                                double* residual_out) {
  return solve_impl(g, cond, S, rtol, residual_out, false);
}

Eigen::VectorXd kirchhoff_solve_blocks(const Graph& g,
                                       const Eigen::VectorXd& cond,
                                       const Eigen::VectorXd& S, double rtol,
                                       double* residual_out) {
  return solve_impl(g, cond, S, rtol, residual_out, true);
}

}  // namespace auxinet
