#include "fub/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "fub/reachset.hpp"

namespace fub {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Stream seed for audit `property`, sample `index`: every audit consumes
/// its own family of per-sample streams, so reports are independent of
/// thread count and of each other.
std::uint64_t audit_seed(std::uint64_t run_seed, std::string_view property) {
  return run_seed ^ fnv1a64(property);
}

void sort_witnesses(std::vector<AuditWitness>& w) {
  std::sort(w.begin(), w.end(), [](const AuditWitness& a, const AuditWitness& b) {
    if (a.sample_index != b.sample_index) return a.sample_index < b.sample_index;
    return a.letter < b.letter;
  });
}

std::string label_text(const std::optional<int>& label) {
  return label.has_value() ? std::to_string(*label) : "none";
}

}  // namespace

Eigen::VectorXd sample_class_point(const FiniteUniformBisimulation& fub, int class_id,
                                   SampleRng& rng, double scale) {
  return fub.sample_cell_point(class_id, rng, scale);
}

AuditReport check_invariance(const SystemSpec& sys, const StatePartition& partition,
                             const RunConfig& cfg) {
  const auto start = Clock::now();
  AuditReport report;
  report.property = "invariance";
  report.seed = cfg.seed;
  report.samples = cfg.sample_count;
  const int k = partition.class_count();
  const std::uint64_t base = audit_seed(cfg.seed, report.property);
  std::vector<AuditWitness> violations;
#pragma omp parallel
  {
    std::vector<AuditWitness> local;
#pragma omp for schedule(static) nowait
    for (long i = 0; i < cfg.sample_count; ++i) {
      SampleRng rng = derive_stream(base, static_cast<std::uint64_t>(i));
      const int cls = static_cast<int>(i % k);
      Eigen::VectorXd x = partition.sample_point(cls, rng);
      for (int t = 0; t < cfg.trajectory_depth; ++t) {
        const int letter = static_cast<int>(rng.below(static_cast<std::uint64_t>(sys.q())));
        x = sys.step(x, letter);
        if (!partition.classify(x).has_value()) {
          AuditWitness w;
          w.sample_index = i;
          w.point = x;
          w.letter = letter;
          w.label_a = cls;
          w.detail = "trajectory from class " + std::to_string(cls) +
                     " left all classes at step " + std::to_string(t + 1);
          local.push_back(std::move(w));
          break;
        }
      }
    }
#pragma omp critical
    violations.insert(violations.end(), local.begin(), local.end());
  }
  sort_witnesses(violations);
  report.violations = std::move(violations);
  if (cfg.sample_count == 0) report.note = "no evidence: zero samples requested";
  report.elapsed_seconds = seconds_since(start);
  return report;
}

AuditReport check_uniformity(const SystemSpec& sys, const StatePartition& partition,
                             const RunConfig& cfg) {
  const auto start = Clock::now();
  AuditReport report;
  report.property = "uniformity";
  report.seed = cfg.seed;
  report.samples = cfg.sample_count;
  const int k = partition.class_count();
  if (k < 2) report.note = "degenerate relation: fewer than two classes";
  const std::uint64_t base = audit_seed(cfg.seed, report.property);
  std::vector<AuditWitness> violations;
#pragma omp parallel
  {
    std::vector<AuditWitness> local;
#pragma omp for schedule(static) nowait
    for (long i = 0; i < cfg.sample_count; ++i) {
      SampleRng rng = derive_stream(base, static_cast<std::uint64_t>(i));
      const int cls = static_cast<int>(i % k);
      const Eigen::VectorXd x = partition.sample_point(cls, rng);
      const Eigen::VectorXd x2 = partition.sample_point(cls, rng);
      for (int u = 0; u < sys.q(); ++u) {
        const std::optional<int> a = partition.classify(sys.step(x, u));
        const std::optional<int> b = partition.classify(sys.step(x2, u));
        if (a != b) {
          AuditWitness w;
          w.sample_index = i;
          w.point = x;
          w.second_point = x2;
          w.letter = u;
          w.label_a = a;
          w.label_b = b;
          w.detail = "equivalent pair in class " + std::to_string(cls) +
                     " separates under letter " + std::to_string(u) + " (" + label_text(a) +
                     " vs " + label_text(b) + ")";
          local.push_back(std::move(w));
        }
      }
    }
#pragma omp critical
    violations.insert(violations.end(), local.begin(), local.end());
  }
  sort_witnesses(violations);
  report.violations = std::move(violations);
  if (cfg.sample_count == 0) report.note = "no evidence: zero samples requested";
  report.elapsed_seconds = seconds_since(start);
  return report;
}

AuditReport check_disjointness(const FiniteUniformBisimulation& fub, const RunConfig& cfg) {
  const auto start = Clock::now();
  AuditReport report;
  report.property = "disjointness";
  report.seed = cfg.seed;
  report.samples = cfg.sample_count;
  std::vector<AuditWitness> violations;

  // Analytic part: base clouds stay farther apart than the certified d.
  const auto& clouds = fub.base_clouds();
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    for (std::size_t j = i + 1; j < clouds.size(); ++j) {
      const double dist = min_cross_distance(clouds[i], clouds[j]);
      if (dist < fub.provenance().d) {
        AuditWitness w;
        w.sample_index = -1;
        w.label_a = static_cast<int>(i);
        w.label_b = static_cast<int>(j);
        w.detail = "base clouds " + std::to_string(i) + " and " + std::to_string(j) +
                   " are only " + std::to_string(dist) + " apart (certified d = " +
                   std::to_string(fub.provenance().d) + ")";
        violations.push_back(std::move(w));
      }
    }
  }

  // Sampled part: each sampled point must satisfy exactly one membership
  // predicate.
  const int k = fub.class_count();
  const std::uint64_t base = audit_seed(cfg.seed, report.property);
#pragma omp parallel
  {
    std::vector<AuditWitness> local;
#pragma omp for schedule(static) nowait
    for (long i = 0; i < cfg.sample_count; ++i) {
      SampleRng rng = derive_stream(base, static_cast<std::uint64_t>(i));
      const int cls = static_cast<int>(i % k);
      const Eigen::VectorXd x = fub.sample_cell_point(cls, rng);
      int owners = 0;
      int first = -1, second = -1;
      for (int c = 0; c < k; ++c) {
        if (fub.member(c, x)) {
          ++owners;
          if (owners == 1)
            first = c;
          else if (owners == 2)
            second = c;
        }
      }
      if (owners != 1) {
        AuditWitness w;
        w.sample_index = i;
        w.point = x;
        w.label_a = first >= 0 ? std::optional<int>(first) : std::nullopt;
        w.label_b = second >= 0 ? std::optional<int>(second) : std::nullopt;
        w.detail = "sample of class " + std::to_string(cls) + " belongs to " +
                   std::to_string(owners) + " classes";
        local.push_back(std::move(w));
      }
    }
#pragma omp critical
    violations.insert(violations.end(), local.begin(), local.end());
  }
  sort_witnesses(violations);
  report.violations = std::move(violations);
  if (cfg.sample_count == 0) report.note = "no evidence: zero samples requested";
  report.elapsed_seconds = seconds_since(start);
  return report;
}

AuditReport check_trace_equivalence(const SystemSpec& sys, const StatePartition& partition,
                                    const Dfm& dfm, long words, int length, std::uint64_t seed) {
  const auto start = Clock::now();
  AuditReport report;
  report.property = "trace-equivalence";
  report.seed = seed;
  report.samples = words;
  const int k = partition.class_count();
  const std::uint64_t base = audit_seed(seed, report.property);
  std::vector<AuditWitness> violations;
#pragma omp parallel
  {
    std::vector<AuditWitness> local;
#pragma omp for schedule(static) nowait
    for (long i = 0; i < words; ++i) {
      SampleRng rng = derive_stream(base, static_cast<std::uint64_t>(i));
      const int cls = static_cast<int>(i % k);
      const Eigen::VectorXd x0 = partition.sample_point(cls, rng);
      std::vector<int> inputs(static_cast<std::size_t>(length));
      for (int& u : inputs) u = static_cast<int>(rng.below(static_cast<std::uint64_t>(sys.q())));
      const TraceVerdict verdict = trace_equivalence_check(sys, partition, dfm, x0, inputs);
      if (!verdict.ok) {
        AuditWitness w;
        w.sample_index = i;
        w.point = x0;
        w.letter = verdict.divergence_index > 0 &&
                           verdict.divergence_index <= static_cast<int>(inputs.size())
                       ? inputs[static_cast<std::size_t>(verdict.divergence_index - 1)]
                       : -1;
        w.label_a = verdict.continuous_label;
        w.label_b = verdict.dfm_label;
        w.detail = "plant and quotient machine diverge at step " +
                   std::to_string(verdict.divergence_index) + " (" +
                   label_text(verdict.continuous_label) + " vs " +
                   std::to_string(verdict.dfm_label) + ")";
        local.push_back(std::move(w));
      }
    }
#pragma omp critical
    violations.insert(violations.end(), local.begin(), local.end());
  }
  sort_witnesses(violations);
  report.violations = std::move(violations);
  if (words == 0) report.note = "no evidence: zero words requested";
  report.elapsed_seconds = seconds_since(start);
  return report;
}

NecessaryConditionReport necessary_condition_report(const SystemSpec& sys) {
  NecessaryConditionReport report;
  report.rho = sys.rho;
  report.scalar = sys.n == 1;
  if (sys.rho <= 1.0) return report;
  report.warn = true;
  std::ostringstream msg;
  if (report.scalar) {
    msg << "|a| = " << sys.rho
        << " exceeds 1: no regular finite uniform bisimulation of this scalar system has 0 "
           "in the interior of its zero-class";
    report.message = msg.str();
  } else {
    msg << "spectral radius " << sys.rho
        << " exceeds 1: no regular finite uniform bisimulation has a bounded zero-class "
           "with 0 in its interior";
    report.message = msg.str();
    report.caveat =
        "relations with an unbounded zero-class are not ruled out for expanding systems";
  }
  return report;
}

AuditReport counterexample_audit() {
  const auto start = Clock::now();
  AuditReport report;
  report.property = "counterexample";
  report.samples = 3;

  Eigen::MatrixXd A(3, 3);
  A << 2, 0, -1, -1, -7, 11, 0, 4, 6;
  Eigen::MatrixXd B(3, 2);
  B << 1, 2, 1, 1, 1, 1;

  const auto expect_exact = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                const Eigen::Vector3d& want, long index) {
    const Eigen::VectorXd got = A * x + B * u;
    if (!(got.array() == want.array()).all()) {
      AuditWitness w;
      w.sample_index = index;
      w.point = got;
      w.second_point = want;
      w.detail = "successor mismatch";
      report.violations.push_back(std::move(w));
    }
  };

  Eigen::VectorXd u(2);
  u << 0, 60;
  expect_exact(Eigen::Vector3d(1, -2, -3), u, Eigen::Vector3d(125, 40, 34), 0);
  expect_exact(Eigen::Vector3d(8, -18, -24), u, Eigen::Vector3d(160, -86, -156), 1);
  expect_exact(Eigen::Vector3d(0, 0, 0), Eigen::Vector2d(0, 0), Eigen::Vector3d(0, 0, 0), 2);

  report.elapsed_seconds = seconds_since(start);
  return report;
}

}  // namespace fub
