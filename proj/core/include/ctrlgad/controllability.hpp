#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ctrlgad/graph.hpp"

namespace ctrlgad {

struct ControllabilityConfig {
  /// Quadrature step. The default matches the evaluation setup this toolkit
  /// reproduces.
  double step_size = 0.2;

  /// Total integration time. 0 means adaptive: accumulate until the trace of
  /// the per-step increment drops below 1e-9 of the running trace, capped at
  /// t = 200.
  double horizon = 0.0;

  /// Control matrix B. Empty means identity (n x n).
  Eigen::MatrixXd control_matrix;

  /// Add reciprocal edges before scoring, mirroring the preprocessing used
  /// for edge weighting.
  bool symmetrize_first = true;

  /// Replace the right Riemann sum with the trapezoidal rule. Off by
  /// default; the plain sum is the published procedure.
  bool trapezoid = false;

  /// Retain the full Gramian in the result (n x n memory).
  bool keep_gramian = false;

  /// recurrence: step the transition matrix explicitly. spectral: one
  /// symmetric eigendecomposition plus per-mode geometric sums, identical
  /// math, much faster for large graphs. auto_select picks spectral for
  /// symmetric adjacency with identity B above 256 nodes.
  enum class Backend { auto_select, recurrence, spectral };
  Backend backend = Backend::auto_select;
};

struct ControllabilityResult {
  std::vector<double> scores;        // Gramian diagonal, one entry per node
  Eigen::MatrixXd gramian;           // populated only when keep_gramian
  double spectral_radius = 0.0;      // l of the adjacency
  double spectral_abscissa = 0.0;    // largest eigenvalue real part of the normalized system
  std::size_t steps_used = 0;
  double horizon_used = 0.0;
  std::vector<std::string> warnings; // e.g. scores at or above 1
};

/// A / (l + 1) - I with l the spectral radius of A. For symmetric A every
/// eigenvalue of the result lies in [-2, -1/(l+1)], so the system is stable.
Eigen::MatrixXd normalize_adjacency(const Eigen::MatrixXd& a);

/// Average controllability per node: diagonal of the finite-horizon Gramian
/// sum_i e^{A_norm t_i} B B^T e^{A_norm^T t_i} dt over t_i = dt, 2dt, ..., T.
/// Deterministic for a fixed config regardless of backend or thread count.
ControllabilityResult average_controllability(const Graph& g,
                                              const ControllabilityConfig& cfg = {});

/// Exact infinite-horizon Gramian from the Lyapunov solver; diagnostic and
/// test oracle, not a production path. Applies the same symmetrize-first
/// preprocessing as the default config.
Eigen::MatrixXd gramian_oracle(const Graph& g);

}  // namespace ctrlgad
