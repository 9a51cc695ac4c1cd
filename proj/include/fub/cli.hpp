#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace fub {

struct CommandOutcome {
  std::string command;
  std::string spec_digest;
  std::vector<std::string> outputs;  ///< files written
  int exit_code = 0;
  std::string summary_json;  ///< machine-readable summary block
};

struct ComputeOptions {
  int algorithm = 2;  ///< 1 = partition split, 2 = per-letter refinement
  std::optional<long> min_classes;
  std::optional<double> epsilon;
  std::optional<int> k_max;
  std::string out_dir = "fub-out";
  bool force = false;  ///< bypass the hypothesis gate (logged)
};

struct VerifyOptions {
  std::optional<long> samples;
  std::optional<int> depth;
  long trace_words = 1000;
  int trace_length = 100;
  std::optional<std::uint64_t> seed;
  std::string report_path;  ///< empty = next to the artifact
};

CommandOutcome cmd_analyze(const std::string& spec_path);
CommandOutcome cmd_compute(const std::string& spec_path, const ComputeOptions& opts);
CommandOutcome cmd_verify(const std::string& artifact_path, const std::string& spec_path,
                          const VerifyOptions& opts);
CommandOutcome cmd_export_dfm(const std::string& artifact_path);
CommandOutcome cmd_export_geometry(const std::string& artifact_path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace fub
