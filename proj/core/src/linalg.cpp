#include "ctrlgad/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "ctrlgad/errors.hpp"
#include "ctrlgad/rng.hpp"

namespace ctrlgad {
namespace {

void require_square_finite(const Eigen::MatrixXd& m, const char* who) {
  if (m.rows() != m.cols())
    throw PreconditionError(std::string(who) + ": matrix is " + std::to_string(m.rows()) +
                            "x" + std::to_string(m.cols()) + ", expected square");
  if (!m.allFinite())
    throw PreconditionError(std::string(who) + ": matrix has non-finite entries");
}

bool is_symmetric(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return true;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

}  // namespace

double spectral_radius_dense(const Eigen::MatrixXd& m) {
  require_square_finite(m, "spectral_radius_dense");
  if (m.rows() == 0) return 0.0;
  if (is_symmetric(m)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
      throw NumericError("spectral_radius_dense: symmetric eigensolver failed");
    return solver.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  if (solver.info() != Eigen::Success)
    throw NumericError("spectral_radius_dense: eigensolver failed");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_radius(const Eigen::MatrixXd& m, double tol, std::size_t max_iter) {
  require_square_finite(m, "spectral_radius");
  if (!(tol > 0.0)) throw PreconditionError("spectral_radius: tol must be positive");
  const Eigen::Index n = m.rows();
  if (n == 0) return 0.0;
  if (n <= 64 || !is_symmetric(m)) return spectral_radius_dense(m);

  // Shifted power iteration. With c >= rho, every eigenvalue of c I +/- m is
  // non-negative, so the norm ratio settles monotonically instead of beating
  // when the spectrum pairs +l with -l (bipartite adjacency) or nearly so.
  // The two shifts recover whichever end of the spectrum dominates.
  const double c = m.cwiseAbs().rowwise().sum().maxCoeff();
  if (c == 0.0) return 0.0;

  Rng start_rng(0x5eed);
  Eigen::VectorXd x0(n);
  for (Eigen::Index i = 0; i < n; ++i) x0(i) = start_rng.normal();
  x0.normalize();

  const auto shifted_dominant = [&](double sign) {
    Eigen::VectorXd x = x0;
    double previous = -1.0;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
      Eigen::VectorXd y = c * x + sign * (m * x);
      const double rho = y.norm();
      if (rho < 1e-300) return 0.0;
      if (previous >= 0.0 && std::abs(rho - previous) <= tol * rho) return rho;
      previous = rho;
      x = y / rho;
    }
    throw NumericError("spectral_radius: power iteration did not converge within " +
                       std::to_string(max_iter) + " iterations");
  };

  return std::max(shifted_dominant(1.0), shifted_dominant(-1.0)) - c;
}

Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& m) {
  require_square_finite(m, "matrix_exp");
  const Eigen::Index n = m.rows();
  if (n == 0) return m;

  // Pade(13) with scaling and squaring; theta is the largest 1-norm the
  // order-13 approximant handles at double precision.
  static const double theta13 = 5.371920351148152;
  static const double b[] = {64764752532480000.0,
                             32382376266240000.0,
                             7771770303897600.0,
                             1187353796428800.0,
                             129060195264000.0,
                             10559470521600.0,
                             670442572800.0,
                             33522128640.0,
                             1323241920.0,
                             40840800.0,
                             960960.0,
                             16380.0,
                             182.0,
                             1.0};

  const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 == 0.0) return Eigen::MatrixXd::Identity(n, n);
  int squarings = 0;
  if (norm1 > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    if (squarings > 60)
      throw NumericError("matrix_exp: 1-norm " + std::to_string(norm1) +
                         " is too large; rescale the input");
  }
  const Eigen::MatrixXd a = m / std::pow(2.0, squarings);

  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd a2 = a * a;
  const Eigen::MatrixXd a4 = a2 * a2;
  const Eigen::MatrixXd a6 = a2 * a4;
  const Eigen::MatrixXd u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
           b[3] * a2 + b[1] * identity);
  const Eigen::MatrixXd v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                            b[4] * a4 + b[2] * a2 + b[0] * identity;

  Eigen::MatrixXd result = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) result = result * result;
  if (!result.allFinite()) throw NumericError("matrix_exp: result is non-finite");
  return result;
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& sys, const Eigen::MatrixXd& rhs) {
  require_square_finite(sys, "solve_lyapunov");
  require_square_finite(rhs, "solve_lyapunov");
  const Eigen::Index n = sys.rows();
  if (rhs.rows() != n)
    throw PreconditionError("solve_lyapunov: sys is " + std::to_string(n) + "x" +
                            std::to_string(n) + " but rhs is " + std::to_string(rhs.rows()) +
                            "x" + std::to_string(rhs.cols()));
  if (!is_symmetric(rhs))
    throw PreconditionError("solve_lyapunov: rhs must be symmetric");
  if (n > 100)
    throw PreconditionError("solve_lyapunov: dense oracle path supports n <= 100, got " +
                            std::to_string(n));
  if (n == 0) return sys;

  Eigen::EigenSolver<Eigen::MatrixXd> spectrum(sys, false);
  if (spectrum.info() != Eigen::Success)
    throw NumericError("solve_lyapunov: eigensolver failed on the system matrix");
  const double abscissa = spectrum.eigenvalues().real().maxCoeff();
  if (abscissa >= -1e-12)
    throw StabilityError("solve_lyapunov: system matrix is not stable (spectral abscissa " +
                         std::to_string(abscissa) + ")");

  // (I (x) sys + sys (x) I) vec(W) = -vec(rhs), column-stacked.
  const Eigen::Index nn = n * n;
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(nn, nn);
  for (Eigen::Index j = 0; j < n; ++j) k.block(j * n, j * n, n, n) = sys;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index d = 0; d < n; ++d) k(i * n + d, j * n + d) += sys(i, j);

  Eigen::VectorXd b(nn);
  Eigen::Map<const Eigen::VectorXd> rhs_vec(rhs.data(), nn);
  b = -rhs_vec;

  const Eigen::VectorXd w_vec = k.partialPivLu().solve(b);
  Eigen::MatrixXd w = Eigen::Map<const Eigen::MatrixXd>(w_vec.data(), n, n);
  w = ((w + w.transpose()) / 2.0).eval();

  const double residual = (sys * w + w * sys.transpose() + rhs).norm();
  if (!w.allFinite() || residual > 1e-9 * std::max(1e-30, rhs.norm()))
    throw NumericError("solve_lyapunov: residual " + std::to_string(residual) +
                       " exceeds tolerance; system is near-singular");
  return w;
}

}  // namespace ctrlgad
