#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fub/bisim.hpp"
#include "fub/sysmodel.hpp"

namespace fub {

/// Deterministic finite state machine over equivalence classes:
/// total transition table states x letters -> states.
struct Dfm {
  int state_count = 0;
  int letter_count = 0;
  std::vector<int> delta;  ///< delta[s * letter_count + u]

  int next(int state, int letter) const { return delta[state * letter_count + letter]; }
};

/// Quotient construction: for every class and letter, every skeleton
/// representative must reach the same class; disagreement throws
/// NotWellDefined, an unclassifiable successor throws
/// UnclassifiableSuccessor.
Dfm build_dfm(const SystemSpec& sys, const StatePartition& partition);

/// Pure table walk; returns the length |inputs|+1 state sequence.
std::vector<int> simulate_dfm(const Dfm& dfm, int q0, std::span<const int> inputs);

struct TraceVerdict {
  bool ok = true;
  int divergence_index = -1;
  std::optional<int> continuous_label;
  int dfm_label = -1;
};

/// Runs the plant from x0 and the DFM from [x0] on the same input word and
/// compares labels step by step.
TraceVerdict trace_equivalence_check(const SystemSpec& sys, const StatePartition& partition,
                                     const Dfm& dfm, const Eigen::VectorXd& x0,
                                     std::span<const int> inputs);

/// Graphviz dot text, deterministic node/edge order. parse_graph accepts
/// exactly what export_graph emits (round-trip tested).
std::string export_graph(const Dfm& dfm);
Dfm parse_graph(const std::string& text);

/// Tab-separated (state, letter, next) listing.
std::string export_transition_table(const Dfm& dfm);

}  // namespace fub
