#pragma once

#include <memory>
#include <string>
#include <vector>

#include "auxinet/dynamics.hpp"
#include "auxinet/ode.hpp"

namespace auxinet {

// Transport-activity model packed as y = [a(0..n-1); X(0..m-1)]. Both parts
// are guarded nonnegative; only X may be pinned at 0 (a = 0 is not
// invariant, production and diffusion push it back up).
class PrimarySystem : public OdeSystem {
 public:
  PrimarySystem(const Graph& g, const ModelParams& p);

  int size() const override;
  void rhs(double t, const Eigen::VectorXd& y,
           Eigen::VectorXd& f) const override;
  void jacobian(double t, const Eigen::VectorXd& y,
                Eigen::SparseMatrix<double>& jac) const override;
  const std::vector<char>& nonneg_mask() const override { return nonneg_; }
  const std::vector<char>& absorbing_mask() const override {
    return absorbing_;
  }
  std::string component_name(int k) const override;
  std::string failure_hint(double t, const Eigen::VectorXd& y) const override;

  Eigen::VectorXd pack(const Eigen::VectorXd& a,
                       const Eigen::VectorXd& X) const;
  NetworkState unpack(double t, const Eigen::VectorXd& y) const;

  const Graph& graph() const { return g_; }
  const ModelParams& params() const { return p_; }

 private:
  const Graph& g_;
  ModelParams p_;
  std::vector<char> nonneg_;
  std::vector<char> absorbing_;
};

// Conductivity adaptation driven by the pressure problem, y = [C(0..m-1)].
// Every rhs evaluation solves the potentials; the largest linear-solve
// residual seen is kept for reporting.
class HuCaiSystem : public OdeSystem {
 public:
  HuCaiSystem(const Graph& g, const ModelParams& p);

  int size() const override;
  void rhs(double t, const Eigen::VectorXd& y,
           Eigen::VectorXd& f) const override;
  const std::vector<char>& nonneg_mask() const override { return nonneg_; }
  const std::vector<char>& absorbing_mask() const override { return nonneg_; }
  std::string component_name(int k) const override;

  double max_solve_residual() const { return max_residual_; }

  // Pressures plus the unpacked (P, C) state for reports.
  NetworkState unpack(double t, const Eigen::VectorXd& y) const;

  const Graph& graph() const { return g_; }
  const ModelParams& params() const { return p_; }

 private:
  const Graph& g_;
  ModelParams p_;
  std::vector<char> nonneg_;
  mutable double max_residual_ = 0.0;
};

// Signal-flux model packed as y = [s(0..n-1); D(0..m-1)]. Signals are
// unconstrained (sinks may drive them negative); capacities are guarded and
// absorbing at 0.
class MitchisonSystem : public OdeSystem {
 public:
  MitchisonSystem(const Graph& g, const ModelParams& p);

  int size() const override;
  void rhs(double t, const Eigen::VectorXd& y,
           Eigen::VectorXd& f) const override;
  const std::vector<char>& nonneg_mask() const override { return nonneg_; }
  const std::vector<char>& absorbing_mask() const override { return nonneg_; }
  std::string component_name(int k) const override;

  Eigen::VectorXd pack(const Eigen::VectorXd& s,
                       const Eigen::VectorXd& D) const;
  NetworkState unpack(double t, const Eigen::VectorXd& y) const;

  const Graph& graph() const { return g_; }
  const ModelParams& params() const { return p_; }

 private:
  const Graph& g_;
  ModelParams p_;
  std::vector<char> nonneg_;  // s entries 0, D entries 1
};

}  // namespace auxinet
