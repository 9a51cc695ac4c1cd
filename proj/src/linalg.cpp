#include "fub/linalg.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "fub/errors.hpp"

namespace fub {

namespace {

constexpr double kInverseQualityGate = 1e-9;

SimilarityTransform finish_transform(const Eigen::MatrixXd& A, double epsilon, double rho,
                                     Eigen::MatrixXd T, Eigen::MatrixXd T_inv,
                                     double certificate) {
  SimilarityTransform out;
  out.T = std::move(T);
  out.T_inv = std::move(T_inv);
  out.epsilon = epsilon;
  out.rho = rho;
  out.norm_certificate = certificate;
  out.T_norm = induced_one_norm(out.T);
  out.T_inv_norm = induced_one_norm(out.T_inv);
  out.kappa = 2.0 * out.T_norm * out.T_inv_norm / (1.0 - rho - epsilon);
  if (!(out.kappa > 0.0) || !std::isfinite(out.kappa))
    throw NumericError("separation constant kappa is not positive and finite");
  (void)A;
  return out;
}

}  // namespace

double spectral_radius(const Eigen::MatrixXd& A) {
  if (!A.allFinite()) throw NumericError("spectral_radius: matrix has non-finite entries");
  Eigen::EigenSolver<Eigen::MatrixXd> solver(A, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw NumericError("spectral_radius: eigenvalue iteration failed to converge");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double induced_one_norm(const Eigen::MatrixXd& A) {
  if (A.size() == 0) return 0.0;
  return A.cwiseAbs().colwise().sum().maxCoeff();
}

std::vector<double> power_norm_sequence(const Eigen::MatrixXd& A, int k_max) {
  std::vector<double> norms;
  norms.reserve(static_cast<size_t>(k_max));
  Eigen::MatrixXd P = A;
  for (int k = 1; k <= k_max; ++k) {
    if (k > 1) P = P * A;
    if (!P.allFinite())
      throw NumericError("power_norm_sequence: A^" + std::to_string(k) +
                         " overflowed to non-finite values");
    norms.push_back(induced_one_norm(P));
  }
  return norms;
}

SimilarityTransform build_transform(const Eigen::MatrixXd& A, double epsilon) {
  const double rho = spectral_radius(A);
  if (!(rho + epsilon < 1.0))
    throw NumericError("build_transform requires rho + epsilon < 1 (rho = " +
                       std::to_string(rho) + ", epsilon = " + std::to_string(epsilon) + ")");
  const int n = static_cast<int>(A.rows());

  Eigen::RealSchur<Eigen::MatrixXd> schur(A);
  if (schur.info() != Eigen::Success)
    throw NumericError("build_transform: real Schur iteration failed to converge");
  const Eigen::MatrixXd Q = schur.matrixU();
  const Eigen::MatrixXd R = Q.transpose() * A * Q;

  // T = Q diag(delta^0..delta^{n-1}); the scaling damps the strict upper
  // triangle of R. Decade grid, first certificate wins.
  for (int decade = 0; decade <= 12; ++decade) {
    const double delta = std::pow(10.0, -decade);
    Eigen::VectorXd diag(n), diag_inv(n);
    double p = 1.0;
    for (int i = 0; i < n; ++i) {
      diag[i] = p;
      diag_inv[i] = 1.0 / p;
      p *= delta;
    }
    const Eigen::MatrixXd scaled = diag_inv.asDiagonal() * R * diag.asDiagonal();
    const double certificate = induced_one_norm(scaled);
    if (certificate <= rho + epsilon) {
      Eigen::MatrixXd T = Q * diag.asDiagonal();
      Eigen::MatrixXd T_inv = diag_inv.asDiagonal() * Q.transpose();
      const double quality =
          induced_one_norm(T * T_inv - Eigen::MatrixXd::Identity(n, n));
      if (quality > kInverseQualityGate) continue;
      return finish_transform(A, epsilon, rho, std::move(T), std::move(T_inv), certificate);
    }
  }
  throw UnsupportedSpectrum(
      "no diagonal Schur rescaling certifies ||T^-1 A T||_1 <= rho + epsilon (rho = " +
      std::to_string(rho) + ", epsilon = " + std::to_string(epsilon) +
      "); this can happen for complex eigenvalue pairs. Supply a transform explicitly "
      "via \"options.transform\" in the spec file.");
}

SimilarityTransform certify_transform(const Eigen::MatrixXd& A, double epsilon,
                                      const Eigen::MatrixXd& T) {
  const double rho = spectral_radius(A);
  if (!(rho + epsilon < 1.0))
    throw NumericError("certify_transform requires rho + epsilon < 1");
  const int n = static_cast<int>(A.rows());
  if (T.rows() != n || T.cols() != n)
    throw NumericError("supplied transform has wrong dimensions");
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(T);
  Eigen::MatrixXd T_inv = lu.inverse();
  const double quality = induced_one_norm(T * T_inv - Eigen::MatrixXd::Identity(n, n));
  if (quality > kInverseQualityGate)
    throw NumericError("supplied transform is too ill-conditioned: ||T T^-1 - I||_1 = " +
                       std::to_string(quality));
  const double certificate = induced_one_norm(T_inv * A * T);
  if (certificate > rho + epsilon)
    throw NumericError("supplied transform fails the norm certificate: ||T^-1 A T||_1 = " +
                       std::to_string(certificate) + " > rho + epsilon = " +
                       std::to_string(rho + epsilon));
  return finish_transform(A, epsilon, rho, T, std::move(T_inv), certificate);
}

double reach_norm_bound(const SystemSpec& sys) {
  if (!(sys.rho < 1.0))
    throw NumericError("reach_norm_bound requires a Schur stable A (rho = " +
                       std::to_string(sys.rho) + ")");
  constexpr int kMaxWindow = 64;
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(sys.n, sys.n);
  double partial_sum = 0.0;  // sum of ||A^t||_1 for t < K
  for (int K = 1; K <= kMaxWindow; ++K) {
    partial_sum += induced_one_norm(P);  // adds ||A^{K-1}||_1
    P = P * sys.A;
    if (!P.allFinite()) throw NumericError("reach_norm_bound: matrix power overflow");
    const double tail = induced_one_norm(P);  // ||A^K||_1
    if (tail < 1.0) return sys.input_norm_max * partial_sum / (1.0 - tail);
  }
  throw NumericError(
      "reach_norm_bound: no K <= 64 with ||A^K||_1 < 1; the system is too close to "
      "marginal stability for the geometric tail bound");
}

}  // namespace fub
