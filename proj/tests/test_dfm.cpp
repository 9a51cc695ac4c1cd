#include <doctest.h>

#include <algorithm>

#include "fub/dfm.hpp"
#include "fub/verify.hpp"
#include "fixtures.hpp"

using namespace fub;

namespace {

FiniteUniformBisimulation planar_fub(long z) {
  RunConfig cfg;
  cfg.min_classes = z;
  cfg.seed = 20240801;
  return algorithm2(fixtures::triangular2d(), cfg);
}

}  // namespace

TEST_CASE("strip relation quotient: both strips flow into the inner one") {
  const auto sys = fixtures::expanding2d();
  const fixtures::StripPartition strips;
  const Dfm dfm = build_dfm(sys, strips);
  CHECK(dfm.state_count == 2);
  CHECK(dfm.letter_count == 1);
  CHECK(dfm.next(0, 0) == 1);
  CHECK(dfm.next(1, 0) == 1);
}

TEST_CASE("quotient machine of the 5-class relation is total") {
  const auto fub = planar_fub(4);
  const Dfm dfm = build_dfm(fub.system(), fub);
  CHECK(dfm.state_count == 5);
  CHECK(dfm.letter_count == 5);
  CHECK(dfm.delta.size() == 25);
  for (int v : dfm.delta) CHECK(v >= 0);
  // with eta = 0 the base transition is the incoming letter's class
  for (int s = 0; s < 5; ++s)
    for (int u = 0; u < 5; ++u) CHECK(dfm.next(s, u) == u);
}

TEST_CASE("25-class quotient machine acts as a shift register") {
  const auto fub = planar_fub(24);
  const Dfm dfm = build_dfm(fub.system(), fub);
  CHECK(dfm.state_count == 25);
  // state id = tuple * 5 + base; letter u sends it to u * 5 + tuple
  for (int tuple = 0; tuple < 5; ++tuple)
    for (int base = 0; base < 5; ++base)
      for (int u = 0; u < 5; ++u) CHECK(dfm.next(tuple * 5 + base, u) == u * 5 + tuple);
}

TEST_CASE("non-uniform partition is rejected by construction") {
  const auto sys = fixtures::unstable3d_single();
  const auto partition = fixtures::non_uniform_partition();
  CHECK_THROWS_AS(build_dfm(sys, partition), NotWellDefined);
  try {
    build_dfm(sys, partition);
  } catch (const NotWellDefined& e) {
    CHECK(e.class_id() == 0);
    CHECK(e.letter() == 0);
  }
}

TEST_CASE("simulation") {
  const auto sys = fixtures::expanding2d();
  const Dfm dfm = build_dfm(sys, fixtures::StripPartition{});
  SUBCASE("empty input returns the start state") {
    CHECK(simulate_dfm(dfm, 0, {}) == std::vector<int>{0});
  }
  SUBCASE("constant letter from the outer strip") {
    const std::vector<int> inputs{0, 0, 0};
    CHECK(simulate_dfm(dfm, 0, inputs) == std::vector<int>{0, 1, 1, 1});
  }
  SUBCASE("deterministic replay") {
    const std::vector<int> inputs{0, 0};
    CHECK(simulate_dfm(dfm, 1, inputs) == simulate_dfm(dfm, 1, inputs));
  }
  SUBCASE("unknown state or letter") {
    CHECK_THROWS_AS(simulate_dfm(dfm, 7, {}), std::out_of_range);
    const std::vector<int> bad{2};
    CHECK_THROWS_AS(simulate_dfm(dfm, 0, bad), std::out_of_range);
  }
}

TEST_CASE("trace equivalence") {
  const auto fub = planar_fub(4);
  const SystemSpec& sys = fub.system();
  const Dfm dfm = build_dfm(sys, fub);
  SampleRng rng(123);
  const Eigen::VectorXd x0 = fub.sample_cell_point(2, rng);

  SUBCASE("empty word is trivially equivalent") {
    CHECK(trace_equivalence_check(sys, fub, dfm, x0, {}).ok);
  }
  SUBCASE("random word stays equivalent") {
    std::vector<int> inputs;
    for (int i = 0; i < 100; ++i)
      inputs.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(sys.q()))));
    const TraceVerdict verdict = trace_equivalence_check(sys, fub, dfm, x0, inputs);
    CHECK(verdict.ok);
  }
  SUBCASE("corrupted transition is caught at its first use") {
    Dfm corrupted = dfm;
    const int start = *fub.classify(x0);
    const int letter = 3;
    corrupted.delta[static_cast<size_t>(start * corrupted.letter_count + letter)] =
        (dfm.next(start, letter) + 1) % dfm.state_count;
    const std::vector<int> inputs{letter, 0};
    const TraceVerdict verdict = trace_equivalence_check(sys, fub, corrupted, x0, inputs);
    CHECK_FALSE(verdict.ok);
    CHECK(verdict.divergence_index == 1);
    CHECK(verdict.continuous_label.has_value());
    CHECK(verdict.continuous_label != verdict.dfm_label);
  }
}

TEST_CASE("graph export and round trip") {
  SUBCASE("single state self loop") {
    Dfm dfm;
    dfm.state_count = 1;
    dfm.letter_count = 1;
    dfm.delta = {0};
    const std::string dot = export_graph(dfm);
    CHECK(dot.find("q0;") != std::string::npos);
    CHECK(dot.find("q0 -> q0 [label=\"u0\"];") != std::string::npos);
    const Dfm parsed = parse_graph(dot);
    CHECK(parsed.state_count == 1);
    CHECK(parsed.letter_count == 1);
    CHECK(parsed.delta == dfm.delta);
  }
  SUBCASE("5-state machine: 5 nodes, 25 edges, exact round trip") {
    const auto fub = planar_fub(4);
    const Dfm dfm = build_dfm(fub.system(), fub);
    const std::string dot = export_graph(dfm);
    CHECK(std::count(dot.begin(), dot.end(), '>') == 25);
    const Dfm parsed = parse_graph(dot);
    CHECK(parsed.state_count == dfm.state_count);
    CHECK(parsed.letter_count == dfm.letter_count);
    CHECK(parsed.delta == dfm.delta);
  }
  SUBCASE("strip machine: 2 nodes, 2 edges") {
    const Dfm dfm = build_dfm(fixtures::expanding2d(), fixtures::StripPartition{});
    const std::string dot = export_graph(dfm);
    CHECK(std::count(dot.begin(), dot.end(), '>') == 2);
    CHECK(parse_graph(dot).delta == dfm.delta);
  }
  SUBCASE("incomplete table rejected") {
    CHECK_THROWS_AS(parse_graph("digraph dfm {\n q0;\n q1;\n q0 -> q1 [label=\"u0\"];\n}\n"),
                    FormatError);
    CHECK_THROWS_AS(parse_graph("not a graph"), FormatError);
  }
}

TEST_CASE("transition table export") {
  const Dfm dfm = build_dfm(fixtures::expanding2d(), fixtures::StripPartition{});
  const std::string tsv = export_transition_table(dfm);
  CHECK(tsv.find("state\tletter\tnext") != std::string::npos);
  CHECK(tsv.find("0\t0\t1") != std::string::npos);
  CHECK(tsv.find("1\t0\t1") != std::string::npos);
}

TEST_CASE("quotient construction is deterministic") {
  const auto fub = planar_fub(24);
  const Dfm a = build_dfm(fub.system(), fub);
  const Dfm b = build_dfm(fub.system(), fub);
  CHECK(a.delta == b.delta);
}
