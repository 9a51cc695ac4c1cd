#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fub/sysmodel.hpp"

namespace fub {

/// Invertible T with a certified bound ||T^{-1} A T||_1 <= rho + epsilon.
/// kappa = 2 ||T||_1 ||T^{-1}||_1 / (1 - rho - epsilon) is the separation
/// threshold constant used by both construction algorithms.
struct SimilarityTransform {
  Eigen::MatrixXd T;
  Eigen::MatrixXd T_inv;
  double epsilon = 0.0;
  double norm_certificate = 0.0;  ///< computed ||T^{-1} A T||_1
  double kappa = 0.0;
  double rho = 0.0;
  double T_norm = 0.0;      ///< ||T||_1
  double T_inv_norm = 0.0;  ///< ||T^{-1}||_1
};

/// max |lambda| over the full (possibly complex) spectrum.
double spectral_radius(const Eigen::MatrixXd& A);

/// Max absolute column sum (closed form of the 1-induced norm).
double induced_one_norm(const Eigen::MatrixXd& A);

/// ||A^k||_1 for k = 1..k_max, powers by iterated multiplication.
/// Throws NumericError if a power overflows to non-finite values.
std::vector<double> power_norm_sequence(const Eigen::MatrixXd& A, int k_max);

/// Builds T = Q diag(delta^0..delta^{n-1}) from the real Schur factor Q,
/// searching delta over {1, 1e-1, ..., 1e-12} and returning the first
/// scaling whose certificate passes. Requires rho + epsilon < 1.
/// Throws UnsupportedSpectrum when no grid point certifies (possible for
/// complex-pair Schur blocks); callers may then supply T explicitly.
SimilarityTransform build_transform(const Eigen::MatrixXd& A, double epsilon);

/// Certifies a user-supplied T: inverse quality ||T T^{-1} - I||_1 <= 1e-9
/// and the same norm certificate as build_transform.
SimilarityTransform certify_transform(const Eigen::MatrixXd& A, double epsilon,
                                      const Eigen::MatrixXd& T);

/// Outer bound R on the 1-norm of every forced-response point:
/// R = h * (sum_{t<K} ||A^t||_1) / (1 - ||A^K||_1) for the smallest K <= 64
/// with ||A^K||_1 < 1. Requires rho < 1.
double reach_norm_bound(const SystemSpec& sys);

}  // namespace fub
