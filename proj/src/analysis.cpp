#include "auxinet/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "auxinet/errors.hpp"

namespace auxinet {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Top-quartile mask: entries >= 75th percentile (nearest-rank).
std::vector<char> top_quartile(const Eigen::VectorXd& v) {
  std::vector<double> sorted(v.data(), v.data() + v.size());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t rank = sorted.size() - (sorted.size() + 3) / 4;
  const double cut = sorted[rank];
  std::vector<char> mask(static_cast<std::size_t>(v.size()), 0);
  for (int i = 0; i < v.size(); ++i) mask[static_cast<std::size_t>(i)] = v[i] >= cut ? 1 : 0;
  return mask;
}

}  // namespace

MurrayReport murray_residual(const Graph& g, const ModelParams& p,
                             const NetworkState& st, bool input_was_steady) {
  if (!(p.kappa > 0.0))
    throw ConfigError("the radius law needs kappa > 0");
  const int n = g.vertex_count();
  const int m = g.edge_count();
  if (st.a.size() != n || st.X.size() != m)
    throw DimensionError("state sizes do not match the graph");

  MurrayReport rep;
  rep.input_was_steady = input_was_steady;
  rep.vertex_residual = Eigen::VectorXd::Constant(n, kNan);
  rep.vertex_relative = Eigen::VectorXd::Constant(n, kNan);

  // Actual fluxes decide the flow direction; the law substitutes the
  // steady-state magnitude (tau X^{gamma+1})^{1/kappa} for |Q|.
  Eigen::VectorXd q = edge_gradient_flux(g, st.X, st.a);
  Eigen::VectorXd law_mag(m), qk(m), xg(m);
  double flux_scale = 0.0;
  for (int e = 0; e < m; ++e) {
    xg[e] = p.tau * std::pow(std::max(st.X[e], 0.0), p.gamma + 1.0);
    law_mag[e] = std::pow(xg[e], 1.0 / p.kappa);
    qk[e] = std::pow(std::abs(q[e]), p.kappa);
    flux_scale = std::max({flux_scale, qk[e], xg[e]});
  }

  // Per-edge equilibrium identity, rated only where there is enough flux or
  // activity for a relative error to mean anything.
  const double floor = 1e-10 * flux_scale;
  for (int e = 0; e < m; ++e) {
    const double big = std::max(qk[e], xg[e]);
    if (big <= floor) {
      ++rep.edges_below_floor;
      continue;
    }
    rep.max_edge_relative =
        std::max(rep.max_edge_relative, std::abs(qk[e] - xg[e]) / big);
  }

  for (int i = 0; i < n; ++i) {
    if (p.I[i] != 0.0) {
      rep.skipped.push_back(i);
      continue;
    }
    double in = 0.0, out = 0.0;
    for (auto [j, e] : g.neighbors(i)) {
      (void)j;
      const Edge& ed = g.edges()[static_cast<std::size_t>(e)];
      const double into_i = ed.i == i ? q[e] : -q[e];
      if (into_i > 0.0)
        in += law_mag[e];
      else if (into_i < 0.0)
        out += law_mag[e];
    }
    const double res = std::abs(p.delta * in + p.S[i] - p.delta * out);
    const double scale = p.delta * (in + out) + std::abs(p.S[i]);
    rep.vertex_residual[i] = res;
    rep.vertex_relative[i] = scale > 0.0 ? res / scale : 0.0;
    rep.max_absolute = std::max(rep.max_absolute, res);
    rep.max_relative = std::max(rep.max_relative, rep.vertex_relative[i]);
  }
  if (!input_was_steady)
    rep.notes.push_back(
        "state was not flagged steady; residuals measure distance from "
        "equilibrium, not solver error");
  if (rep.skipped.size() == static_cast<std::size_t>(n))
    rep.notes.push_back("every vertex has I != 0; the law applies nowhere");
  return rep;
}

nlohmann::json MurrayReport::to_json() const {
  nlohmann::json j;
  j["max_relative"] = max_relative;
  j["max_absolute"] = max_absolute;
  j["max_edge_relative"] = max_edge_relative;
  j["edges_below_floor"] = edges_below_floor;
  j["skipped_vertices"] = skipped;
  j["input_was_steady"] = input_was_steady;
  j["notes"] = notes;
  return j;
}

BoundReport check_bounds(const Graph& g, const ModelParams& p,
                         const SimulationResult& run) {
  const int n = g.vertex_count();
  const int m = g.edge_count();
  if (run.states.empty()) throw DimensionError("empty trajectory");
  if (run.states.front().size() != n + m)
    throw DimensionError("trajectory states do not match the graph");

  BoundReport rep;
  rep.source_free = p.S.size() == n && p.S.lpNorm<1>() == 0.0;
  rep.alpha = run.states.front().head(n).norm();
  rep.min_a = std::numeric_limits<double>::infinity();
  rep.max_a = -std::numeric_limits<double>::infinity();
  rep.min_x = std::numeric_limits<double>::infinity();

  auto flag = [&](const std::string& v) {
    if (rep.violations.size() < 32) rep.violations.push_back(v);
  };
  auto note = [&](const std::string& v) {
    if (rep.notes.size() < 32) rep.notes.push_back(v);
  };

  // Integrator resolution: values this close to zero are indistinguishable
  // from tiny positives and clamps park them at exactly zero. Hand-built
  // trajectories carry atol = 0, which keeps everything strict.
  const double slack = std::max(run.atol, 0.0);

  // Vertices already reported as legitimately resting at zero, to keep the
  // informational list from repeating once per snapshot.
  std::vector<char> noted(static_cast<std::size_t>(n), 0);

  for (std::size_t k = 0; k < run.states.size(); ++k) {
    const double t = run.times[k];
    const auto a = run.states[k].head(n);
    const auto x = run.states[k].tail(m);
    const double amin = a.minCoeff();
    const double amax = a.maxCoeff();
    const double xmin = x.minCoeff();
    rep.min_a = std::min(rep.min_a, amin);
    rep.max_a = std::max(rep.max_a, amax);
    rep.min_x = std::min(rep.min_x, xmin);
    if (xmin < -slack)
      flag("X = " + std::to_string(xmin) + " < 0 at t = " + std::to_string(t));
    if (amin <= 0.0) {
      // Concentration can rest at zero only where the dynamics cannot lift
      // it back above the integrator's resolution: no production and the
      // influx through incident edges below the tolerance scale. Anything
      // else nonpositive means positivity was genuinely lost.
      const double lift_tol =
          10.0 * std::max(slack, 1e-12) * std::max(1.0, amax);
      for (int i = 0; i < n; ++i) {
        if (a[i] > 0.0) continue;
        double forcing = p.S.size() == n ? p.S[i] : 0.0;
        for (const auto& [nb, e] : g.neighbors(i)) {
          const double len = g.edges()[static_cast<std::size_t>(e)].length;
          forcing +=
              p.delta * std::max(x[e], 0.0) * std::max(a[nb], 0.0) / len;
        }
        if (a[i] >= -slack && forcing <= lift_tol) {
          if (!noted[static_cast<std::size_t>(i)]) {
            noted[static_cast<std::size_t>(i)] = 1;
            note("a[" + std::to_string(i) +
                 "] rests at zero below integrator resolution from t = " +
                 std::to_string(t));
          }
        } else {
          flag("a[" + std::to_string(i) + "] = " + std::to_string(a[i]) +
               " lost strict positivity at t = " + std::to_string(t));
        }
      }
    }
    if (rep.source_free &&
        amax > rep.alpha + std::max(1e-12, 1e-9 * rep.alpha))
      flag("a = " + std::to_string(amax) + " exceeds the source-free bound " +
           std::to_string(rep.alpha) + " at t = " + std::to_string(t));
  }
  return rep;
}

nlohmann::json BoundReport::to_json() const {
  nlohmann::json j;
  j["alpha"] = alpha;
  j["source_free"] = source_free;
  j["min_a"] = min_a;
  j["max_a"] = max_a;
  j["min_x"] = min_x;
  j["violations"] = violations;
  j["notes"] = notes;
  j["pass"] = pass();
  return j;
}

EnergyReport energy_dissipation(const Graph& g, const ModelParams& p,
                                const SimulationResult& run, double rtol) {
  if (run.states.empty()) throw DimensionError("empty trajectory");
  if (run.states.front().size() != g.edge_count())
    throw DimensionError(
        "trajectory states are not per-edge conductivities");
  EnergyReport rep;
  rep.energy.reserve(run.states.size());
  double emax = 0.0;
  for (const auto& c : run.states) {
    rep.energy.push_back(network_energy(g, p, c));
    emax = std::max(emax, std::abs(rep.energy.back()));
  }
  rep.tolerance = rtol * emax;
  for (std::size_t k = 1; k < rep.energy.size(); ++k)
    rep.max_increase =
        std::max(rep.max_increase, rep.energy[k] - rep.energy[k - 1]);
  rep.monotone = rep.max_increase <= rep.tolerance;
  return rep;
}

nlohmann::json EnergyReport::to_json() const {
  nlohmann::json j;
  j["energy"] = energy;
  j["max_increase"] = max_increase;
  j["tolerance"] = tolerance;
  j["monotone"] = monotone;
  return j;
}

double symmetry_error(const Graph& g, const NetworkState& st,
                      ReflectionAxis axis) {
  const auto perm = reflection_permutation(g, axis);
  if (!perm)
    throw GeometryError("graph is not mirror-symmetric about this axis");
  if (st.a.size() != g.vertex_count() || st.X.size() != g.edge_count())
    throw DimensionError("state sizes do not match the graph");

  double scale = std::max(st.a.lpNorm<Eigen::Infinity>(),
                          st.X.lpNorm<Eigen::Infinity>());
  if (scale == 0.0) scale = 1.0;
  double worst = 0.0;
  for (int v = 0; v < g.vertex_count(); ++v)
    worst = std::max(worst,
                     std::abs(st.a[v] - st.a[(*perm)[static_cast<std::size_t>(v)]]));
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edges()[static_cast<std::size_t>(e)];
    const int me = g.edge_between((*perm)[static_cast<std::size_t>(ed.i)],
                                  (*perm)[static_cast<std::size_t>(ed.j)]);
    worst = std::max(worst, std::abs(st.X[e] - st.X[me]));
  }
  return worst / scale;
}

int pattern_extent(const NetworkState& st, double threshold) {
  int count = 0;
  for (int e = 0; e < st.X.size(); ++e)
    if (st.X[e] >= threshold) ++count;
  return count;
}

double high_region_overlap(const Graph& g, const NetworkState& st) {
  if (st.a.size() != g.vertex_count() || st.X.size() != g.edge_count())
    throw DimensionError("state sizes do not match the graph");
  Eigen::VectorXd incident = Eigen::VectorXd::Zero(g.vertex_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edges()[static_cast<std::size_t>(e)];
    incident[ed.i] = std::max(incident[ed.i], st.X[e]);
    incident[ed.j] = std::max(incident[ed.j], st.X[e]);
  }
  const std::vector<char> ma = top_quartile(st.a);
  const std::vector<char> mx = top_quartile(incident);
  int inter = 0, uni = 0;
  for (std::size_t v = 0; v < ma.size(); ++v) {
    if (ma[v] && mx[v]) ++inter;
    if (ma[v] || mx[v]) ++uni;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
}

}  // namespace auxinet
