#include "auxinet/ode.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "auxinet/errors.hpp"

namespace auxinet {
namespace {

constexpr int kMaxOrderLimit = 5;
constexpr int kNewtonMaxIter = 4;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;
constexpr double kEps = std::numeric_limits<double>::epsilon();

double rms(const Eigen::VectorXd& v) {
  if (v.size() == 0) return 0.0;
  return std::sqrt(v.squaredNorm() / static_cast<double>(v.size()));
}

// Coefficient table for the variable-order multistep family. gam are the
// harmonic sums, kap the blending coefficients (kap[1] = 0 keeps order 1
// exactly implicit Euler; orders 2..5 use the standard blended values with
// better stability angles), alpha the step scaling and error_const the
// truncation error constants.
struct Coeffs {
  double gam[kMaxOrderLimit + 1];
  double alpha[kMaxOrderLimit + 1];
  double error_const[kMaxOrderLimit + 1];
  Coeffs() {
    const double kap[kMaxOrderLimit + 1] = {0.0,     0.0,     -1.0 / 9.0,
                                            -0.0823, -0.0415, 0.0};
    gam[0] = 0.0;
    for (int k = 1; k <= kMaxOrderLimit; ++k) gam[k] = gam[k - 1] + 1.0 / k;
    for (int k = 0; k <= kMaxOrderLimit; ++k) {
      alpha[k] = (1.0 - kap[k]) * gam[k];
      error_const[k] = kap[k] * gam[k] + 1.0 / (k + 1);
    }
  }
};

const Coeffs& coeffs() {
  static const Coeffs c;
  return c;
}

// Pascal-style rescaling matrix: backward differences built on step h map
// onto differences built on step factor*h via R(order, factor) * U where
// U = R(order, 1).
Eigen::MatrixXd compute_R(int order, double factor) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(order + 1, order + 1);
  for (int i = 1; i <= order; ++i)
    for (int j = 1; j <= order; ++j)
      M(i, j) = (i - 1 - factor * j) / static_cast<double>(i);
  M.row(0).setOnes();
  for (int i = 1; i <= order; ++i)
    M.row(i) = M.row(i).cwiseProduct(M.row(i - 1));
  return M;
}

void change_difference_table(Eigen::MatrixXd& D, int order, double factor) {
  const Eigen::MatrixXd R = compute_R(order, factor);
  const Eigen::MatrixXd U = compute_R(order, 1.0);
  const Eigen::MatrixXd RU = R * U;
  D.topRows(order + 1) = RU.transpose() * D.topRows(order + 1);
}

struct Stepper {
  const OdeSystem& sys;
  const IntegratorConfig& cfg;
  const int n;
  const std::vector<char>& nonneg;
  const std::vector<char>& absorbing;
  std::vector<char> frozen;

  double t;
  double h_abs = 0.0;
  int order = 1;
  int n_equal = 0;
  Eigen::VectorXd y;
  Eigen::MatrixXd D;  // rows 0..order+2 hold scaled backward differences

  Eigen::SparseMatrix<double> J;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool lu_valid = false;
  bool current_jac = false;
  double newton_tol;

  IntegrationStats stats;
  std::vector<std::string> events;
  long clamp_count = 0;

  Stepper(const OdeSystem& s, double t0, const Eigen::VectorXd& y0,
          const IntegratorConfig& c)
      : sys(s),
        cfg(c),
        n(s.size()),
        nonneg(s.nonneg_mask()),
        absorbing(s.absorbing_mask()),
        frozen(static_cast<std::size_t>(s.size()), 0),
        t(t0),
        y(y0),
        D(Eigen::MatrixXd::Zero(kMaxOrderLimit + 3, s.size())) {
    newton_tol =
        std::max(10.0 * kEps / cfg.rtol, std::min(0.03, std::sqrt(cfg.rtol)));
  }

  bool masked(const std::vector<char>& mask, int k) const {
    return !mask.empty() && mask[static_cast<std::size_t>(k)];
  }

  void note(std::string msg) {
    if (events.size() < 200) events.push_back(std::move(msg));
  }

  bool eval_rhs(double tt, const Eigen::VectorXd& yy, Eigen::VectorXd& f) {
    sys.rhs(tt, yy, f);
    ++stats.rhs_evals;
    for (int k = 0; k < n; ++k)
      if (frozen[static_cast<std::size_t>(k)]) f[k] = 0.0;
    return f.allFinite();
  }

  void refresh_jacobian(double tt, const Eigen::VectorXd& yy) {
    sys.jacobian(tt, yy, J);
    ++stats.jacobians;
    current_jac = true;
    lu_valid = false;
  }

  // Newton matrix I - c J with pinned components replaced by the identity
  // row/column, which is the reduced system on the free components.
  bool factorize(double c) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(J.nonZeros()) +
                 static_cast<std::size_t>(n));
    for (int outer = 0; outer < J.outerSize(); ++outer) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(J, outer); it; ++it) {
        const int r = static_cast<int>(it.row());
        const int cc = static_cast<int>(it.col());
        if (frozen[static_cast<std::size_t>(r)] ||
            frozen[static_cast<std::size_t>(cc)])
          continue;
        trip.emplace_back(r, cc, -c * it.value());
      }
    }
    for (int i = 0; i < n; ++i) trip.emplace_back(i, i, 1.0);
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    lu.compute(A);
    ++stats.factorizations;
    lu_valid = lu.info() == Eigen::Success;
    return lu_valid;
  }

  void pin(int k, double at) {
    frozen[static_cast<std::size_t>(k)] = 1;
    D.col(k).setZero();
    lu_valid = false;
    note("t=" + std::to_string(at) + ": " + sys.component_name(k) +
         " reached 0 and is pinned there");
  }

  // Pin absorbing components that are exactly zero (initial data or after a
  // guard clamp); their zero dynamics are exact and removing them keeps
  // fractional-power Jacobians finite.
  void pin_initial_zeros() {
    if (absorbing.empty()) return;
    for (int k = 0; k < n; ++k)
      if (masked(absorbing, k) && y[k] == 0.0) pin(k, t);
  }

  [[noreturn]] void fail(const std::string& what) {
    std::string msg = what + " at t=" + std::to_string(t) +
                      " (h=" + std::to_string(h_abs) + ")";
    const std::string hint = sys.failure_hint(t, y);
    if (!hint.empty()) msg += "; " + hint;
    throw IntegrationError(msg);
  }

  struct NewtonResult {
    bool converged = false;
    int iterations = 0;
    Eigen::VectorXd y;
    Eigen::VectorXd d;
  };

  NewtonResult newton(double t_new, const Eigen::VectorXd& y_pred,
                      const Eigen::VectorXd& psi, double c,
                      const Eigen::VectorXd& scale) {
    NewtonResult res;
    res.y = y_pred;
    res.d = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd f(n), dy(n);
    double dy_norm_old = -1.0;
    for (int k = 0; k < kNewtonMaxIter; ++k) {
      res.iterations = k + 1;
      if (!eval_rhs(t_new, res.y, f)) break;
      dy = lu.solve(c * f - psi - res.d);
      if (!dy.allFinite()) break;
      const double dy_norm = rms(dy.cwiseQuotient(scale));
      double rate = -1.0;
      if (dy_norm_old >= 0.0 && dy_norm_old > 0.0) rate = dy_norm / dy_norm_old;
      if (rate >= 1.0 ||
          (rate >= 0.0 && std::pow(rate, kNewtonMaxIter - k) / (1.0 - rate) *
                                  dy_norm >
                              newton_tol))
        break;
      res.d += dy;
      res.y = y_pred + res.d;
      if (dy_norm == 0.0 ||
          (rate >= 0.0 && rate / (1.0 - rate) * dy_norm < newton_tol)) {
        res.converged = true;
        break;
      }
      dy_norm_old = dy_norm;
    }
    return res;
  }

  // One accepted step. Throws IntegrationError when the step size
  // underflows.
  void step() {
    const Coeffs& co = coeffs();
    const double min_step = 10.0 * kEps * std::max(std::abs(t), 1.0);
    if (h_abs > cfg.max_step) {
      change_difference_table(D, order, cfg.max_step / h_abs);
      h_abs = cfg.max_step;
      n_equal = 0;
      lu_valid = false;
    } else if (h_abs < min_step) {
      change_difference_table(D, order, min_step / h_abs);
      h_abs = min_step;
      n_equal = 0;
      lu_valid = false;
    }

    bool accepted = false;
    double safety = 0.9;
    Eigen::VectorXd y_new, d, scale;
    double t_new = t;
    double error_norm = 0.0;

    while (!accepted) {
      if (h_abs < min_step) fail("step size underflow");
      t_new = t + h_abs;
      if (t_new > cfg.t_max) {
        t_new = cfg.t_max;
        change_difference_table(D, order, (t_new - t) / h_abs);
        n_equal = 0;
        lu_valid = false;
        h_abs = t_new - t;
      }
      const double h = h_abs;

      const Eigen::VectorXd y_pred =
          D.topRows(order + 1).colwise().sum().transpose();
      Eigen::VectorXd psi = Eigen::VectorXd::Zero(n);
      for (int m = 1; m <= order; ++m) psi += co.gam[m] * D.row(m).transpose();
      psi /= co.alpha[order];
      const double c = h / co.alpha[order];
      scale = (cfg.atol + cfg.rtol * y_pred.array().abs()).matrix();

      NewtonResult nr;
      bool newton_ok = false;
      while (true) {
        if (!lu_valid && !factorize(c)) {
          // Singular iteration matrix: treat like a Newton failure so the
          // step shrinks (c -> 0 drives the matrix to the identity).
          if (!current_jac) {
            refresh_jacobian(t_new, y_pred);
            continue;
          }
          break;
        }
        nr = newton(t_new, y_pred, psi, c, scale);
        if (nr.converged) {
          newton_ok = true;
          break;
        }
        if (current_jac) break;
        refresh_jacobian(t_new, y_pred);
      }
      if (!newton_ok) {
        ++stats.rejected;
        change_difference_table(D, order, 0.5);
        h_abs *= 0.5;
        n_equal = 0;
        lu_valid = false;
        continue;
      }

      safety = 0.9 * (2.0 * kNewtonMaxIter + 1.0) /
               (2.0 * kNewtonMaxIter + nr.iterations);
      y_new = nr.y;
      d = nr.d;
      scale = (cfg.atol + cfg.rtol * y_new.array().abs()).matrix();
      error_norm = rms((co.error_const[order] * d).cwiseQuotient(scale));
      if (!(error_norm <= 1.0)) {  // also catches NaN
        ++stats.rejected;
        const double factor =
            std::isfinite(error_norm)
                ? std::max(kMinFactor,
                           safety * std::pow(error_norm,
                                             -1.0 / (order + 1)))
                : kMinFactor;
        change_difference_table(D, order, factor);
        h_abs *= factor;
        n_equal = 0;
        lu_valid = false;
        continue;
      }

      // Nonnegativity guard: serious undershoot rejects the step, roundoff
      // undershoot clamps to zero.
      if (!nonneg.empty()) {
        bool reject = false;
        for (int k = 0; k < n && !reject; ++k)
          if (masked(nonneg, k) && y_new[k] < -cfg.atol) reject = true;
        if (reject) {
          ++stats.rejected;
          change_difference_table(D, order, 0.5);
          h_abs *= 0.5;
          n_equal = 0;
          lu_valid = false;
          continue;
        }
        for (int k = 0; k < n; ++k) {
          if (masked(nonneg, k) && y_new[k] < 0.0) {
            if (clamp_count < 8)
              note("t=" + std::to_string(t_new) + ": clamped " +
                   sys.component_name(k) + " (" + std::to_string(y_new[k]) +
                   ") to 0");
            ++clamp_count;
            y_new[k] = 0.0;
          }
        }
        d = y_new - y_pred;
      }
      accepted = true;
    }

    ++stats.steps;
    ++n_equal;
    t = t_new;
    y = y_new;
    current_jac = false;

    D.row(order + 2) = d.transpose() - D.row(order + 1);
    D.row(order + 1) = d.transpose();
    for (int m = order; m >= 0; --m) D.row(m) += D.row(m + 1);

    // Components that landed exactly on zero become permanent zeros.
    if (!absorbing.empty()) {
      for (int k = 0; k < n; ++k)
        if (masked(absorbing, k) && !frozen[static_cast<std::size_t>(k)] &&
            y[k] == 0.0)
          pin(k, t);
    }

    if (n_equal < order + 1) return;

    // Enough equal steps to trust the difference table: consider moving one
    // order down or up, then rescale the step toward its error target.
    const Eigen::VectorXd err_scale = scale;
    double error_m_norm = std::numeric_limits<double>::infinity();
    double error_p_norm = std::numeric_limits<double>::infinity();
    if (order > 1)
      error_m_norm = rms((co.error_const[order - 1] * D.row(order).transpose())
                             .cwiseQuotient(err_scale));
    if (order < cfg.max_order)
      error_p_norm =
          rms((co.error_const[order + 1] * D.row(order + 2).transpose())
                  .cwiseQuotient(err_scale));

    const double norms[3] = {error_m_norm, error_norm, error_p_norm};
    double factors[3];
    for (int i = 0; i < 3; ++i)
      factors[i] = norms[i] == 0.0
                       ? kMaxFactor / safety
                       : std::pow(norms[i], -1.0 / (order + i));
    int best = 0;
    for (int i = 1; i < 3; ++i)
      if (factors[i] > factors[best]) best = i;
    order += best - 1;

    const double factor = std::min(kMaxFactor, safety * factors[best]);
    change_difference_table(D, order, factor);
    h_abs *= factor;
    n_equal = 0;
    lu_valid = false;
  }

  double select_initial_step(const Eigen::VectorXd& f0) {
    const Eigen::VectorXd scale =
        (cfg.atol + cfg.rtol * y.array().abs()).matrix();
    const double d0 = rms(y.cwiseQuotient(scale));
    const double d1 = rms(f0.cwiseQuotient(scale));
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, (cfg.t_max - t));
    Eigen::VectorXd f1(n);
    const Eigen::VectorXd y1 = y + h0 * f0;
    double d2 = 0.0;
    if (eval_rhs(t + h0, y1, f1)) d2 = rms((f1 - f0).cwiseQuotient(scale)) / h0;
    double h1;
    if (d1 <= 1e-15 && d2 <= 1e-15)
      h1 = std::max(1e-6, h0 * 1e-3);
    else
      h1 = std::pow(0.01 / std::max(d1, d2), 0.5);
    return std::min({100.0 * h0, h1, cfg.max_step, cfg.t_max - t});
  }
};

}  // namespace

void IntegratorConfig::validate() const {
  if (!(rtol > 0.0) || !std::isfinite(rtol))
    throw ConfigError("rtol must be positive");
  if (!(atol >= 0.0) || !std::isfinite(atol))
    throw ConfigError("atol must be nonnegative");
  if (max_order < 1 || max_order > kMaxOrderLimit)
    throw ConfigError("max_order must lie in 1..5");
  if (!(first_step >= 0.0)) throw ConfigError("first_step must be >= 0");
  if (!(max_step > 0.0)) throw ConfigError("max_step must be positive");
  if (!std::isfinite(t_max)) throw ConfigError("t_max must be finite");
  if (snapshot_every < 0) throw ConfigError("snapshot_every must be >= 0");
}

void OdeSystem::jacobian(double t, const Eigen::VectorXd& y,
                         Eigen::SparseMatrix<double>& jac) const {
  // Forward differences, one column per component. States here are O(1)
  // scaled, hence the absolute floor on the probe size.
  const int n = size();
  Eigen::VectorXd f0(n), f1(n), yp = y;
  rhs(t, y, f0);
  std::vector<Eigen::Triplet<double>> trip;
  for (int j = 0; j < n; ++j) {
    const double h = std::sqrt(kEps) * std::max(std::abs(y[j]), 1.0);
    yp[j] = y[j] + h;
    rhs(t, yp, f1);
    yp[j] = y[j];
    for (int i = 0; i < n; ++i) {
      const double v = (f1[i] - f0[i]) / h;
      if (v != 0.0) trip.emplace_back(i, j, v);
    }
  }
  jac.resize(n, n);
  jac.setFromTriplets(trip.begin(), trip.end());
}

const std::vector<char>& OdeSystem::nonneg_mask() const {
  static const std::vector<char> empty;
  return empty;
}

const std::vector<char>& OdeSystem::absorbing_mask() const {
  static const std::vector<char> empty;
  return empty;
}

std::string OdeSystem::component_name(int k) const {
  return "y[" + std::to_string(k) + "]";
}

std::string OdeSystem::failure_hint(double, const Eigen::VectorXd&) const {
  return {};
}

bool at_steady_state(const OdeSystem& sys, double t, const Eigen::VectorXd& y,
                     double tol) {
  Eigen::VectorXd f(sys.size());
  sys.rhs(t, y, f);
  return f.lpNorm<Eigen::Infinity>() <=
         tol * std::max(1.0, y.lpNorm<Eigen::Infinity>());
}

SimulationResult integrate(const OdeSystem& sys, double t0,
                           const Eigen::VectorXd& y0,
                           const IntegratorConfig& cfg) {
  cfg.validate();
  if (y0.size() != sys.size())
    throw DimensionError("initial state size != system size");
  if (!y0.allFinite())
    throw ConfigError("initial state contains non-finite entries");
  if (!(cfg.t_max > t0)) throw ConfigError("t_max must exceed the start time");
  const auto& nonneg = sys.nonneg_mask();
  if (!nonneg.empty() &&
      static_cast<int>(nonneg.size()) != sys.size())
    throw DimensionError("nonneg mask size != system size");
  for (int k = 0; k < sys.size() && !nonneg.empty(); ++k)
    if (nonneg[static_cast<std::size_t>(k)] && y0[k] < 0.0)
      throw ConfigError("initial state violates nonnegativity at component " +
                        std::to_string(k));

  Stepper st(sys, t0, y0, cfg);
  st.pin_initial_zeros();

  SimulationResult out;
  out.atol = cfg.atol;
  auto record = [&](double tt, const Eigen::VectorXd& yy) {
    if (!out.times.empty() && out.times.back() == tt) return;
    out.times.push_back(tt);
    out.states.push_back(yy);
  };
  record(st.t, st.y);

  Eigen::VectorXd f0(sys.size());
  if (!st.eval_rhs(st.t, st.y, f0)) {
    std::string msg = "right-hand side not finite at the initial state";
    const std::string hint = sys.failure_hint(st.t, st.y);
    throw IntegrationError(hint.empty() ? msg : msg + "; " + hint);
  }

  auto steady_now = [&](const Eigen::VectorXd& f) {
    return cfg.steady_tol > 0.0 &&
           f.lpNorm<Eigen::Infinity>() <=
               cfg.steady_tol * std::max(1.0, st.y.lpNorm<Eigen::Infinity>());
  };

  if (steady_now(f0)) {
    out.steady = true;
    out.steady_time = st.t;
    out.stats = st.stats;
    out.events = std::move(st.events);
    return out;
  }

  st.h_abs = cfg.first_step > 0.0 ? std::min(cfg.first_step, cfg.max_step)
                                  : st.select_initial_step(f0);
  st.D.row(0) = st.y.transpose();
  st.D.row(1) = (st.h_abs * f0).transpose();
  st.refresh_jacobian(st.t, st.y);

  long accepted = 0;
  Eigen::VectorXd f(sys.size());
  while (st.t < cfg.t_max) {
    st.step();
    ++accepted;
    const bool cadence_hit =
        cfg.snapshot_every > 0 && accepted % cfg.snapshot_every == 0;
    bool done = st.t >= cfg.t_max;

    if (cfg.steady_tol > 0.0) {
      if (!st.eval_rhs(st.t, st.y, f))
        st.fail("right-hand side not finite at an accepted state");
      if (steady_now(f)) {
        out.steady = true;
        out.steady_time = st.t;
        done = true;
      }
    }
    if (cadence_hit || done) record(st.t, st.y);
    if (done) break;
  }
  record(st.t, st.y);

  if (st.clamp_count > 8)
    st.note(std::to_string(st.clamp_count - 8) +
            " further guard clamps not listed");
  out.stats = st.stats;
  out.events = std::move(st.events);
  return out;
}

}  // namespace auxinet
