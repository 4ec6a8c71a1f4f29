#include "auxinet/systems.hpp"

#include <algorithm>
#include <cmath>

#include "auxinet/errors.hpp"

namespace auxinet {
namespace {

std::string edge_label(const Graph& g, const char* field, int e) {
  const Edge& ed = g.edges()[static_cast<std::size_t>(e)];
  return std::string(field) + "[" + std::to_string(ed.i) + "-" +
         std::to_string(ed.j) + "]";
}

}  // namespace

PrimarySystem::PrimarySystem(const Graph& g, const ModelParams& p)
    : g_(g), p_(p) {
  validate_params(g, p, ModelKind::Primary);
  const int n = g.vertex_count();
  const int m = g.edge_count();
  nonneg_.assign(static_cast<std::size_t>(n + m), 1);
  absorbing_.assign(static_cast<std::size_t>(n + m), 0);
  for (int e = 0; e < m; ++e) absorbing_[static_cast<std::size_t>(n + e)] = 1;
}

int PrimarySystem::size() const {
  return g_.vertex_count() + g_.edge_count();
}

void PrimarySystem::rhs(double, const Eigen::VectorXd& y,
                        Eigen::VectorXd& f) const {
  const int n = g_.vertex_count();
  const int m = g_.edge_count();
  Eigen::VectorXd da(n), dX(m);
  primary_rhs(g_, p_, y.head(n), y.tail(m), da, dX);
  f.resize(n + m);
  f.head(n) = da;
  f.tail(m) = dX;
}

void PrimarySystem::jacobian(double, const Eigen::VectorXd& y,
                             Eigen::SparseMatrix<double>& jac) const {
  const int n = g_.vertex_count();
  const int m = g_.edge_count();
  std::vector<Eigen::Triplet<double>> trip;
  primary_jacobian(g_, p_, y.head(n), y.tail(m), trip);
  jac.resize(n + m, n + m);
  jac.setFromTriplets(trip.begin(), trip.end());
}

std::string PrimarySystem::component_name(int k) const {
  const int n = g_.vertex_count();
  return k < n ? "a[" + std::to_string(k) + "]"
               : edge_label(g_, "X", k - n);
}

std::string PrimarySystem::failure_hint(double,
                                        const Eigen::VectorXd& y) const {
  if (p_.kappa <= p_.gamma) {
    const double xmin = y.tail(g_.edge_count()).minCoeff();
    if (xmin < 1e-12)
      return "an edge activity reached zero while kappa <= gamma makes the "
             "growth term singular there";
  }
  return {};
}

Eigen::VectorXd PrimarySystem::pack(const Eigen::VectorXd& a,
                                    const Eigen::VectorXd& X) const {
  if (a.size() != g_.vertex_count() || X.size() != g_.edge_count())
    throw DimensionError("field sizes do not match the graph");
  Eigen::VectorXd y(a.size() + X.size());
  y.head(a.size()) = a;
  y.tail(X.size()) = X;
  return y;
}

NetworkState PrimarySystem::unpack(double t, const Eigen::VectorXd& y) const {
  NetworkState st;
  st.t = t;
  st.a = y.head(g_.vertex_count());
  st.X = y.tail(g_.edge_count());
  return st;
}

HuCaiSystem::HuCaiSystem(const Graph& g, const ModelParams& p)
    : g_(g), p_(p) {
  validate_params(g, p, ModelKind::HuCai);
  nonneg_.assign(static_cast<std::size_t>(g.edge_count()), 1);
}

int HuCaiSystem::size() const { return g_.edge_count(); }

void HuCaiSystem::rhs(double, const Eigen::VectorXd& y,
                      Eigen::VectorXd& f) const {
  double res = 0.0;
  hu_cai_rhs(g_, p_, y, f, &res);
  max_residual_ = std::max(max_residual_, res);
}

std::string HuCaiSystem::component_name(int k) const {
  return edge_label(g_, "C", k);
}

NetworkState HuCaiSystem::unpack(double t, const Eigen::VectorXd& y) const {
  NetworkState st;
  st.t = t;
  st.a = hu_cai_pressure(g_, p_, y);
  st.X = y;
  return st;
}

MitchisonSystem::MitchisonSystem(const Graph& g, const ModelParams& p)
    : g_(g), p_(p) {
  validate_params(g, p, ModelKind::Mitchison);
  const int n = g.vertex_count();
  const int m = g.edge_count();
  nonneg_.assign(static_cast<std::size_t>(n + m), 0);
  for (int e = 0; e < m; ++e) nonneg_[static_cast<std::size_t>(n + e)] = 1;
}

int MitchisonSystem::size() const {
  return g_.vertex_count() + g_.edge_count();
}

void MitchisonSystem::rhs(double, const Eigen::VectorXd& y,
                          Eigen::VectorXd& f) const {
  const int n = g_.vertex_count();
  const int m = g_.edge_count();
  Eigen::VectorXd ds(n), dD(m);
  mitchison_rhs(g_, p_, y.head(n), y.tail(m), ds, dD);
  f.resize(n + m);
  f.head(n) = ds;
  f.tail(m) = dD;
}

std::string MitchisonSystem::component_name(int k) const {
  const int n = g_.vertex_count();
  return k < n ? "s[" + std::to_string(k) + "]"
               : edge_label(g_, "D", k - n);
}

Eigen::VectorXd MitchisonSystem::pack(const Eigen::VectorXd& s,
                                      const Eigen::VectorXd& D) const {
  if (s.size() != g_.vertex_count() || D.size() != g_.edge_count())
    throw DimensionError("field sizes do not match the graph");
  Eigen::VectorXd y(s.size() + D.size());
  y.head(s.size()) = s;
  y.tail(D.size()) = D;
  return y;
}

NetworkState MitchisonSystem::unpack(double t,
                                     const Eigen::VectorXd& y) const {
  NetworkState st;
  st.t = t;
  st.a = y.head(g_.vertex_count());
  st.X = y.tail(g_.edge_count());
  return st;
}

}  // namespace auxinet
