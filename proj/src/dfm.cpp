#include "fub/dfm.hpp"

#include <sstream>
#include <stdexcept>

#include "fub/errors.hpp"
#include "fub/version.hpp"

namespace fub {

Dfm build_dfm(const SystemSpec& sys, const StatePartition& partition) {
  Dfm dfm;
  dfm.state_count = partition.class_count();
  dfm.letter_count = sys.q();
  dfm.delta.assign(static_cast<std::size_t>(dfm.state_count * dfm.letter_count), -1);
  for (int s = 0; s < dfm.state_count; ++s) {
    const std::vector<Eigen::VectorXd> reps = partition.skeleton(s);
    if (reps.empty()) throw NumericError("class " + std::to_string(s) + " has no representatives");
    for (int u = 0; u < dfm.letter_count; ++u) {
      int target = -1;
      for (const Eigen::VectorXd& x : reps) {
        const std::optional<int> label = partition.classify(sys.step(x, u));
        if (!label.has_value()) throw UnclassifiableSuccessor(s, u);
        if (target < 0)
          target = *label;
        else if (target != *label)
          throw NotWellDefined(s, u, target, *label);
      }
      dfm.delta[static_cast<std::size_t>(s * dfm.letter_count + u)] = target;
    }
  }
  return dfm;
}

std::vector<int> simulate_dfm(const Dfm& dfm, int q0, std::span<const int> inputs) {
  if (q0 < 0 || q0 >= dfm.state_count)
    throw std::out_of_range("simulate_dfm: unknown start state " + std::to_string(q0));
  std::vector<int> states;
  states.reserve(inputs.size() + 1);
  states.push_back(q0);
  int current = q0;
  for (int u : inputs) {
    if (u < 0 || u >= dfm.letter_count)
      throw std::out_of_range("simulate_dfm: unknown letter " + std::to_string(u));
    current = dfm.next(current, u);
    states.push_back(current);
  }
  return states;
}

TraceVerdict trace_equivalence_check(const SystemSpec& sys, const StatePartition& partition,
                                     const Dfm& dfm, const Eigen::VectorXd& x0,
                                     std::span<const int> inputs) {
  TraceVerdict verdict;
  std::optional<int> label = partition.classify(x0);
  if (!label.has_value())
    throw std::invalid_argument("trace_equivalence_check: x0 lies outside every class");
  Eigen::VectorXd x = x0;
  int q = *label;
  for (std::size_t t = 0; t <= inputs.size(); ++t) {
    const std::optional<int> continuous = partition.classify(x);
    if (!continuous.has_value() || *continuous != q) {
      verdict.ok = false;
      verdict.divergence_index = static_cast<int>(t);
      verdict.continuous_label = continuous;
      verdict.dfm_label = q;
      return verdict;
    }
    if (t == inputs.size()) break;
    x = sys.step(x, inputs[t]);
    q = dfm.next(q, inputs[t]);
  }
  return verdict;
}

std::string export_graph(const Dfm& dfm) {
  std::ostringstream out;
  out << "// fub " << kToolVersion << "\n";
  out << "digraph dfm {\n";
  for (int s = 0; s < dfm.state_count; ++s) out << "  q" << s << ";\n";
  for (int s = 0; s < dfm.state_count; ++s)
    for (int u = 0; u < dfm.letter_count; ++u)
      out << "  q" << s << " -> q" << dfm.next(s, u) << " [label=\"u" << u << "\"];\n";
  out << "}\n";
  return out.str();
}

Dfm parse_graph(const std::string& text) {
  // Accepts the restricted dot subset export_graph emits. State and letter
  // counts are inferred from the node declarations and edge labels; the
  // table must come out total.
  struct Edge {
    int from, to, letter;
  };
  std::vector<Edge> edges;
  int states = 0, letters = 0;
  bool graph_seen = false;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (const auto pos = line.find("//"); pos != std::string::npos) line.erase(pos);
    const auto begin = line.find_first_not_of(" \t");
    if (begin == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t\r");
    line = line.substr(begin, end - begin + 1);
    if (line.empty() || line == "}") continue;
    if (line.rfind("digraph", 0) == 0) {
      graph_seen = true;
      continue;
    }
    int from = 0, to = 0, letter = 0;
    if (std::sscanf(line.c_str(), "q%d -> q%d [label=\"u%d\"];", &from, &to, &letter) == 3) {
      edges.push_back({from, to, letter});
      letters = std::max(letters, letter + 1);
      continue;
    }
    if (std::sscanf(line.c_str(), "q%d;", &from) == 1) {
      if (from != states) throw FormatError("node declarations out of order: " + line);
      ++states;
      continue;
    }
    throw FormatError("unrecognized dfm line: " + line);
  }
  if (!graph_seen) throw FormatError("missing digraph header");
  if (states == 0 || letters == 0) throw FormatError("empty dfm graph");
  Dfm dfm;
  dfm.state_count = states;
  dfm.letter_count = letters;
  dfm.delta.assign(static_cast<std::size_t>(states * letters), -1);
  for (const Edge& e : edges) {
    if (e.from < 0 || e.from >= states || e.to < 0 || e.to >= states || e.letter < 0)
      throw FormatError("edge out of range");
    dfm.delta[static_cast<std::size_t>(e.from * letters + e.letter)] = e.to;
  }
  for (int v : dfm.delta)
    if (v < 0) throw FormatError("transition table incomplete");
  return dfm;
}

std::string export_transition_table(const Dfm& dfm) {
  std::ostringstream out;
  out << "# fub " << kToolVersion << "\n";
  out << "state\tletter\tnext\n";
  for (int s = 0; s < dfm.state_count; ++s)
    for (int u = 0; u < dfm.letter_count; ++u)
      out << s << "\t" << u << "\t" << dfm.next(s, u) << "\n";
  return out.str();
}

}  // namespace fub
