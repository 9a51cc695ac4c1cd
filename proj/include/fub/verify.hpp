#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fub/bisim.hpp"
#include "fub/dfm.hpp"

namespace fub {

struct AuditWitness {
  long sample_index = -1;
  Eigen::VectorXd point;
  std::optional<Eigen::VectorXd> second_point;
  int letter = -1;
  std::optional<int> label_a;
  std::optional<int> label_b;
  std::string detail;
};

/// Outcome of one stochastic/exhaustive audit. (seed, config) fully
/// determine the sample stream, so reports are reproducible; every witness
/// re-checks to a violation in isolation.
struct AuditReport {
  std::string property;
  long samples = 0;
  std::vector<AuditWitness> violations;
  std::uint64_t seed = 0;
  double elapsed_seconds = 0.0;
  std::string note;

  bool pass() const { return violations.empty(); }
};

/// Interior sample of a class (see FiniteUniformBisimulation::sample_cell_point).
Eigen::VectorXd sample_class_point(const FiniteUniformBisimulation& fub, int class_id,
                                   SampleRng& rng, double scale = 0.999);

/// Random initial points across classes, random words of length
/// trajectory_depth; violation = any trajectory point outside all classes.
AuditReport check_invariance(const SystemSpec& sys, const StatePartition& partition,
                             const RunConfig& cfg);

/// Sampled pairs (x, x') per class, all letters; violation = successors of
/// an equivalent pair classify differently.
AuditReport check_uniformity(const SystemSpec& sys, const StatePartition& partition,
                             const RunConfig& cfg);

/// Analytic part: cross-class base-center distances >= d. Sampled part:
/// every sampled point satisfies exactly one class membership predicate.
AuditReport check_disjointness(const FiniteUniformBisimulation& fub, const RunConfig& cfg);

/// Sampled word-level comparison of the plant and the DFM (wraps
/// trace_equivalence_check over `words` random words of length `length`).
AuditReport check_trace_equivalence(const SystemSpec& sys, const StatePartition& partition,
                                    const Dfm& dfm, long words, int length, std::uint64_t seed);

/// Contrapositive diagnostics for Schur-unstable systems: when rho(A) > 1
/// no regular finite uniform bisimulation can have a bounded zero-class
/// with 0 in its interior (scalar case: boundedness not required). Quiet
/// when rho <= 1.
struct NecessaryConditionReport {
  double rho = 0.0;
  bool scalar = false;
  bool warn = false;
  std::string message;  ///< empty when silent
  std::string caveat;   ///< unbounded-class escape hatch note, when warning
};

NecessaryConditionReport necessary_condition_report(const SystemSpec& sys);

/// Self-contained audit of the recorded non-uniform counterexample: exact
/// integer arithmetic reproduced in doubles, tolerance zero.
AuditReport counterexample_audit();

}  // namespace fub
