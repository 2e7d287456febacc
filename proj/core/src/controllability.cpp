#include "ctrlgad/controllability.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "ctrlgad/errors.hpp"
#include "ctrlgad/linalg.hpp"

namespace ctrlgad {
namespace {

constexpr double kAdaptiveCap = 200.0;      // hard ceiling on the horizon
constexpr double kAdaptiveCutoff = 1e-9;    // per-step trace vs accumulated trace

struct Quadrature {
  std::size_t max_steps = 0;   // 0 = adaptive
  std::size_t cap_steps = 0;   // adaptive ceiling
};

Quadrature plan_steps(const ControllabilityConfig& cfg) {
  if (!(cfg.step_size > 0.0))
    throw ConfigError("controllability: step_size must be positive");
  Quadrature q;
  if (cfg.horizon > 0.0) {
    q.max_steps = static_cast<std::size_t>(std::floor(cfg.horizon / cfg.step_size + 1e-9));
    if (q.max_steps < 2)
      throw ConfigError("controllability: horizon " + std::to_string(cfg.horizon) +
                        " yields fewer than 2 steps at step_size " +
                        std::to_string(cfg.step_size));
  } else {
    q.cap_steps = static_cast<std::size_t>(std::floor(kAdaptiveCap / cfg.step_size));
    q.cap_steps = std::max<std::size_t>(q.cap_steps, 2);
  }
  return q;
}

bool adjacency_symmetric(const Eigen::MatrixXd& a) {
  return a.rows() == 0 || (a - a.transpose()).cwiseAbs().maxCoeff() == 0.0;
}

void scan_scores(ControllabilityResult& result) {
  std::size_t high = 0;
  std::size_t first_high = 0;
  for (std::size_t i = 0; i < result.scores.size(); ++i) {
    const double s = result.scores[i];
    if (!std::isfinite(s) || s <= 0.0)
      throw NumericError("controllability: score of node " + std::to_string(i) +
                         " is not positive (" + std::to_string(s) + ")");
    if (s >= 1.0 && high++ == 0) first_high = i;
  }
  if (high > 0)
    result.warnings.push_back(std::to_string(high) +
                              " score(s) at or above 1, first at node " +
                              std::to_string(first_high));
}

/// Literal time stepping: advance the transition matrix by one step factor
/// per iteration and accumulate the integrand.
void run_recurrence(const Eigen::MatrixXd& a_norm, const Eigen::MatrixXd& b,
                    const ControllabilityConfig& cfg, const Quadrature& plan,
                    ControllabilityResult& out) {
  const Eigen::Index n = a_norm.rows();
  const double dt = cfg.step_size;
  const Eigen::MatrixXd de = matrix_exp(a_norm * dt);
  Eigen::MatrixXd dea = de;

  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd gramian;
  if (cfg.keep_gramian) gramian = Eigen::MatrixXd::Zero(n, n);

  const bool b_identity = b.size() == 0;
  Eigen::MatrixXd last_integrand_rows;  // dea * b at the final step
  std::size_t steps = 0;
  double total_trace = 0.0;
  while (true) {
    const Eigen::MatrixXd m = b_identity ? dea : Eigen::MatrixXd(dea * b);
    const Eigen::VectorXd inc = m.rowwise().squaredNorm() * dt;
    diag += inc;
    if (cfg.keep_gramian || cfg.trapezoid) last_integrand_rows = m;
    if (cfg.keep_gramian) gramian.noalias() += m * m.transpose() * dt;
    ++steps;
    const double inc_trace = inc.sum();
    total_trace += inc_trace;
    if (plan.max_steps > 0) {
      if (steps >= plan.max_steps) break;
    } else if (steps >= 2 &&
               (inc_trace < kAdaptiveCutoff * total_trace || steps >= plan.cap_steps)) {
      break;
    }
    dea = dea * de;
  }

  if (cfg.trapezoid) {
    // trapezoid = right sum + (dt/2) * (integrand at 0 - integrand at T)
    const Eigen::VectorXd f0 = b_identity
                                   ? Eigen::VectorXd::Ones(n)
                                   : Eigen::VectorXd(b.rowwise().squaredNorm());
    diag += (dt / 2.0) * (f0 - last_integrand_rows.rowwise().squaredNorm()).eval();
    if (cfg.keep_gramian) {
      const Eigen::MatrixXd bbt = b_identity ? Eigen::MatrixXd::Identity(n, n)
                                             : Eigen::MatrixXd(b * b.transpose());
      gramian += (dt / 2.0) * (bbt - last_integrand_rows * last_integrand_rows.transpose());
    }
  }

  out.scores.assign(diag.data(), diag.data() + n);
  if (cfg.keep_gramian) out.gramian = std::move(gramian);
  out.steps_used = steps;
  out.horizon_used = static_cast<double>(steps) * dt;
}

/// Same sum in the eigenbasis of a_norm: one symmetric eigendecomposition,
/// then a geometric accumulation per mode. Requires symmetric a_norm and
/// identity B; algebraically identical to the recurrence.
void run_spectral(const Eigen::MatrixXd& a_norm, const ControllabilityConfig& cfg,
                  const Quadrature& plan, ControllabilityResult& out) {
  const Eigen::Index n = a_norm.rows();
  const double dt = cfg.step_size;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a_norm);
  if (solver.info() != Eigen::Success)
    throw NumericError("controllability: eigendecomposition of the normalized system failed");
  const Eigen::VectorXd mu = solver.eigenvalues();
  const Eigen::MatrixXd& v = solver.eigenvectors();

  const Eigen::VectorXd r = (2.0 * dt * mu.array()).exp();
  Eigen::VectorXd power = r;  // r^s for the current step s
  Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
  std::size_t steps = 0;
  double total_trace = 0.0;
  while (true) {
    q += power * dt;
    ++steps;
    const double inc_trace = power.sum() * dt;
    total_trace += inc_trace;
    if (plan.max_steps > 0) {
      if (steps >= plan.max_steps) break;
    } else if (steps >= 2 &&
               (inc_trace < kAdaptiveCutoff * total_trace || steps >= plan.cap_steps)) {
      break;
    }
    power = power.cwiseProduct(r);
  }
  if (cfg.trapezoid) q += (dt / 2.0) * (Eigen::VectorXd::Ones(n) - power);

  out.scores.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) s += v(i, k) * v(i, k) * q(k);
    out.scores[static_cast<std::size_t>(i)] = s;
  }
  if (cfg.keep_gramian) out.gramian = v * q.asDiagonal() * v.transpose();
  out.steps_used = steps;
  out.horizon_used = static_cast<double>(steps) * dt;
}

}  // namespace

Eigen::MatrixXd normalize_adjacency(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols())
    throw PreconditionError("normalize_adjacency: adjacency must be square");
  if (!a.allFinite())
    throw PreconditionError("normalize_adjacency: adjacency has non-finite entries");
  const double l = spectral_radius(a);
  const Eigen::Index n = a.rows();
  return a / (l + 1.0) - Eigen::MatrixXd::Identity(n, n);
}

ControllabilityResult average_controllability(const Graph& g,
                                              const ControllabilityConfig& cfg) {
  const Quadrature plan = plan_steps(cfg);
  const Eigen::MatrixXd a = cfg.symmetrize_first ? to_dense(symmetrize(g)) : to_dense(g);
  const Eigen::Index n = a.rows();
  if (n == 0) throw PreconditionError("controllability: graph has no nodes");

  const Eigen::MatrixXd& b = cfg.control_matrix;
  if (b.size() != 0 && b.rows() != n)
    throw ConfigError("controllability: control matrix has " + std::to_string(b.rows()) +
                      " rows for " + std::to_string(n) + " nodes");

  const double l = spectral_radius(a);
  const Eigen::MatrixXd a_norm = a / (l + 1.0) - Eigen::MatrixXd::Identity(n, n);

  const bool spectral_ok = b.size() == 0 && adjacency_symmetric(a);
  ControllabilityConfig::Backend backend = cfg.backend;
  if (backend == ControllabilityConfig::Backend::auto_select)
    backend = (spectral_ok && n >= 256) ? ControllabilityConfig::Backend::spectral
                                        : ControllabilityConfig::Backend::recurrence;
  if (backend == ControllabilityConfig::Backend::spectral && !spectral_ok)
    throw ConfigError(
        "controllability: spectral backend requires symmetric adjacency and identity B");

  ControllabilityResult result;
  result.spectral_radius = l;
  result.spectral_abscissa = l / (l + 1.0) - 1.0;
  if (backend == ControllabilityConfig::Backend::spectral)
    run_spectral(a_norm, cfg, plan, result);
  else
    run_recurrence(a_norm, b, cfg, plan, result);
  scan_scores(result);
  return result;
}

Eigen::MatrixXd gramian_oracle(const Graph& g) {
  const Eigen::MatrixXd a = to_dense(symmetrize(g));
  const Eigen::MatrixXd a_norm = normalize_adjacency(a);
  return solve_lyapunov(a_norm, Eigen::MatrixXd::Identity(a.rows(), a.cols()));
}

}  // namespace ctrlgad
