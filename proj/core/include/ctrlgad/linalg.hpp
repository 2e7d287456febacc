#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace ctrlgad {

/// Largest absolute eigenvalue. Small or asymmetric matrices go through a
/// full dense eigendecomposition; large symmetric ones use shifted power
/// iteration, which also handles the paired +l/-l spectra of bipartite
/// adjacency matrices. Throws NumericError when the iteration does not
/// settle within max_iter.
double spectral_radius(const Eigen::MatrixXd& m, double tol = 1e-12,
                       std::size_t max_iter = 20000);

/// Reference path: full eigendecomposition regardless of size.
double spectral_radius_dense(const Eigen::MatrixXd& m);

/// Matrix exponential via Pade approximation with scaling and squaring.
Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& m);

/// Solves sys*W + W*sys^T + rhs = 0 through the Kronecker-linearized system
/// (I (x) sys + sys (x) I) vec(W) = -vec(rhs). sys must be stable (all
/// eigenvalue real parts negative) and rhs symmetric PSD for the result to
/// be a Gramian. Dense oracle path, guarded to n <= 100.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& sys,
                               const Eigen::MatrixXd& rhs);

}  // namespace ctrlgad
