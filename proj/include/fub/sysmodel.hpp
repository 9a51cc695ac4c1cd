#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fub/errors.hpp"

namespace fub {

/// The plant x_{t+1} = A x_t + B u_t with a finite ordered input alphabet.
/// Immutable after construction; spectral data is computed once here and
/// shared by everything downstream.
struct SystemSpec {
  int n = 0;  ///< state dimension
  int m = 0;  ///< input dimension
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  std::vector<Eigen::VectorXd> letters;  ///< q distinct m-vectors, canonical order

  // Cached analysis (filled by create()).
  Eigen::VectorXcd eigenvalues;
  double rho = 0.0;                ///< spectral radius of A
  Eigen::MatrixXd input_images;    ///< n x q, column j = B * letters[j]
  double input_norm_max = 0.0;     ///< h = max_j ||B u_j||_1

  int q() const { return static_cast<int>(letters.size()); }

  /// One plant step under alphabet letter `letter`.
  Eigen::VectorXd step(const Eigen::VectorXd& x, int letter) const {
    return A * x + input_images.col(letter);
  }

  /// Validates dimensions, finiteness and letter distinctness (bitwise),
  /// then caches eigenvalues, rho and the input images.
  static SystemSpec create(Eigen::MatrixXd A, Eigen::MatrixXd B,
                           std::vector<Eigen::VectorXd> letters);
};

/// Run parameters shared by the algorithms, the auditors and the CLI.
struct RunConfig {
  std::optional<double> epsilon;  ///< nullopt = "auto" = (1 - rho)/2
  int k_max = 12;
  long min_classes = 1;  ///< z: requested lower bound on the class count
  long sample_count = 10000;
  int trajectory_depth = 50;
  std::uint64_t seed = 1;
  double membership_tol = 0.0;
  double slack_tol = 1e-9;
  std::uint64_t tuple_budget = 10'000'000;
  std::optional<Eigen::MatrixXd> transform_override;

  bool epsilon_is_auto() const { return !epsilon.has_value(); }

  /// Resolves "auto" to (1 - rho)/2 and validates the open interval
  /// 0 < epsilon < 1 - rho. Throws SpecError otherwise.
  double resolve_epsilon(double rho) const;
};

struct ParsedSpec {
  SystemSpec system;
  RunConfig config;
};

/// Parses the versioned JSON spec document ("fub-spec/1"). Numeric fields
/// accept numbers or strings, including exact rationals like "-3/20".
ParsedSpec parse_spec(const std::string& text);

/// Inverse of parse_spec up to numeric identity: the serialized text parses
/// back to a field-exact SystemSpec / RunConfig.
std::string serialize_spec(const SystemSpec& sys, const RunConfig& cfg);

struct HypothesisReport {
  double rho = 0.0;
  bool schur_stable = false;     ///< rho < 1
  bool zero_in_alphabet = false; ///< some letter equals 0 exactly
  bool invertible = false;       ///< sigma_min(A) > 1e-12 * ||A||_1
  double smallest_singular = 0.0;
  bool multi_letter = false;     ///< q > 1
};

/// Pure diagnostic; no side effects.
HypothesisReport validate_hypotheses(const SystemSpec& sys);

/// FNV-1a 64-bit digest over raw bytes; used to tie artifacts to the spec
/// text they were computed from.
std::uint64_t fnv1a64(std::string_view bytes);
std::string digest_string(std::string_view bytes);

}  // namespace fub
