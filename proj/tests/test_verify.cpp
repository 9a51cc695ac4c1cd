#include <doctest.h>

#include "fub/verify.hpp"
#include "fixtures.hpp"

using namespace fub;

namespace {

RunConfig audit_cfg(long samples, int depth) {
  RunConfig cfg;
  cfg.sample_count = samples;
  cfg.trajectory_depth = depth;
  cfg.seed = 20240801;
  return cfg;
}

FiniteUniformBisimulation planar_fub(long z) {
  RunConfig cfg;
  cfg.min_classes = z;
  cfg.seed = 20240801;
  return algorithm2(fixtures::triangular2d(), cfg);
}

}  // namespace

TEST_CASE("counterexample audit reproduces the recorded successors exactly") {
  const AuditReport report = counterexample_audit();
  CHECK(report.pass());
  CHECK(report.samples == 3);
}

TEST_CASE("strip relation passes invariance and uniformity") {
  const auto sys = fixtures::expanding2d();
  const fixtures::StripPartition strips;
  const RunConfig cfg = audit_cfg(2000, 30);
  const AuditReport inv = check_invariance(sys, strips, cfg);
  CHECK(inv.pass());
  CHECK(inv.samples == 2000);
  const AuditReport uni = check_uniformity(sys, strips, cfg);
  CHECK(uni.pass());
}

TEST_CASE("constructed relations pass the audits") {
  const auto fub = planar_fub(4);
  const RunConfig cfg = audit_cfg(1500, 25);
  CHECK(check_invariance(fub.system(), fub, cfg).pass());
  CHECK(check_uniformity(fub.system(), fub, cfg).pass());
  CHECK(check_disjointness(fub, cfg).pass());
}

TEST_CASE("non-uniform partition fails uniformity with the recorded witness") {
  const auto sys = fixtures::unstable3d_single();
  const auto partition = fixtures::non_uniform_partition();
  const RunConfig cfg = audit_cfg(2000, 10);
  const AuditReport report = check_uniformity(sys, partition, cfg);
  REQUIRE_FALSE(report.pass());

  const Eigen::VectorXd x = fixtures::v3(1, -2, -3);
  const Eigen::VectorXd xp = fixtures::v3(8, -18, -24);
  bool recorded_witness = false;
  for (const auto& w : report.violations) {
    if (!w.second_point.has_value()) continue;
    const bool direct = (w.point.array() == x.array()).all() &&
                        (w.second_point->array() == xp.array()).all();
    const bool swapped = (w.point.array() == xp.array()).all() &&
                         (w.second_point->array() == x.array()).all();
    if (direct || swapped) {
      recorded_witness = true;
      // both successors are on record: classes 1 and 0
      CHECK(((w.label_a == 1 && w.label_b == 0) || (w.label_a == 0 && w.label_b == 1)));
    }
  }
  CHECK(recorded_witness);

  // every witness reproduces its violation in isolation
  for (const auto& w : report.violations) {
    REQUIRE(w.second_point.has_value());
    const auto a = partition.classify(sys.step(w.point, w.letter));
    const auto b = partition.classify(sys.step(*w.second_point, w.letter));
    CHECK(a != b);
  }
}

TEST_CASE("single-class relation is flagged") {
  const auto sys = fixtures::expanding2d();
  fixtures::PointPartition lonely({{fixtures::v2(0, 0)}});
  const AuditReport report = check_uniformity(sys, lonely, audit_cfg(10, 5));
  CHECK(report.pass());
  CHECK(report.note.find("fewer than two classes") != std::string::npos);
}

TEST_CASE("zero samples give a flagged vacuous pass") {
  const auto fub = planar_fub(4);
  const AuditReport report = check_invariance(fub.system(), fub, audit_cfg(0, 10));
  CHECK(report.pass());
  CHECK(report.note.find("no evidence") != std::string::npos);
}

TEST_CASE("fault injection: shrunken radius breaks invariance") {
  auto fub = planar_fub(4);
  fub.override_radius(fub.radius() / 10.0);
  const RunConfig cfg = audit_cfg(500, 10);
  const AuditReport report = check_invariance(fub.system(), fub, cfg);
  REQUIRE_FALSE(report.pass());
  // witnesses re-check deterministically
  for (const auto& w : report.violations) CHECK_FALSE(fub.classify(w.point).has_value());
}

TEST_CASE("fault injection: inflated radius breaks disjointness") {
  auto fub = planar_fub(4);
  fub.override_radius(fub.radius() * 10.0);
  const AuditReport report = check_disjointness(fub, audit_cfg(500, 10));
  REQUIRE_FALSE(report.pass());
  bool sampled_overlap = false;
  for (const auto& w : report.violations) {
    if (w.sample_index < 0) continue;
    sampled_overlap = true;
    REQUIRE(w.label_a.has_value());
    REQUIRE(w.label_b.has_value());
    CHECK(fub.member(*w.label_a, w.point));
    CHECK(fub.member(*w.label_b, w.point));
  }
  CHECK(sampled_overlap);
}

TEST_CASE("audits are reproducible for a fixed seed") {
  const auto fub = planar_fub(4);
  const RunConfig cfg = audit_cfg(400, 10);
  const AuditReport a = check_invariance(fub.system(), fub, cfg);
  const AuditReport b = check_invariance(fub.system(), fub, cfg);
  CHECK(a.samples == b.samples);
  CHECK(a.violations.size() == b.violations.size());
  CHECK(a.seed == b.seed);
}

TEST_CASE("necessary condition diagnostics") {
  SUBCASE("expanding planar system warns with the unbounded-class caveat") {
    const auto report = necessary_condition_report(fixtures::expanding2d());
    CHECK(report.warn);
    CHECK_FALSE(report.scalar);
    CHECK(report.message.find("spectral radius") != std::string::npos);
    CHECK_FALSE(report.caveat.empty());
  }
  SUBCASE("expanding scalar system warns without boundedness") {
    Eigen::MatrixXd A(1, 1), B(1, 1);
    A << 1.5;
    B << 1.0;
    const auto sys = SystemSpec::create(A, B, {Eigen::VectorXd::Zero(1)});
    const auto report = necessary_condition_report(sys);
    CHECK(report.warn);
    CHECK(report.scalar);
    CHECK(report.message.find("|a|") != std::string::npos);
    CHECK(report.caveat.empty());
  }
  SUBCASE("contractive system stays silent") {
    const auto report = necessary_condition_report(fixtures::triangular2d());
    CHECK_FALSE(report.warn);
    CHECK(report.message.empty());
  }
}

TEST_CASE("trace-equivalence audit passes on the 5-class relation") {
  const auto fub = planar_fub(4);
  const Dfm dfm = build_dfm(fub.system(), fub);
  const AuditReport report =
      check_trace_equivalence(fub.system(), fub, dfm, 200, 50, 20240801);
  CHECK(report.pass());
  CHECK(report.samples == 200);
}
