#include <iostream>

#include <CLI11.hpp>

#include "fub/cli.hpp"
#include "fub/errors.hpp"
#include "fub/parallel.hpp"
#include "fub/version.hpp"

int main(int argc, char** argv) {
  fub::apply_thread_env();

  CLI::App app{"finite uniform bisimulations for discrete-time linear systems "
               "over finite input alphabets"};
  app.set_version_flag("--version", fub::kToolVersion);
  app.require_subcommand(1);

  std::string spec_path, artifact_path;

  CLI::App* analyze = app.add_subcommand("analyze", "hypothesis and reachability diagnostics");
  analyze->add_option("spec", spec_path, "spec file (fub-spec/1 JSON)")->required();

  fub::ComputeOptions copts;
  CLI::App* compute = app.add_subcommand("compute", "construct a finite uniform bisimulation");
  compute->add_option("spec", spec_path, "spec file")->required();
  compute->add_option("--algorithm,-a", copts.algorithm, "1 = partition split, 2 = per-letter refinement")
      ->check(CLI::IsMember({1, 2}));
  long min_classes = 0;
  double epsilon = 0.0;
  int k_max = 0;
  CLI::Option* omin = compute->add_option("--min-classes,-z", min_classes,
                                          "lower bound on the class count (algorithm 2)");
  CLI::Option* oeps = compute->add_option("--epsilon,-e", epsilon, "contraction slack epsilon");
  CLI::Option* okmax = compute->add_option("--k-max", k_max, "separation loop iteration cap");
  compute->add_option("--out,-o", copts.out_dir, "output directory (default fub-out)");
  compute->add_flag("--force", copts.force, "bypass the hypothesis gate");

  fub::VerifyOptions vopts;
  CLI::App* verify = app.add_subcommand("verify", "audit a computed artifact against its spec");
  verify->add_option("artifact", artifact_path, "artifact file (fub-artifact/1 JSON)")->required();
  verify->add_option("spec", spec_path, "spec file the artifact was computed from")->required();
  long samples = 0;
  int depth = 0;
  std::uint64_t seed = 0;
  CLI::Option* osamples = verify->add_option("--samples", samples, "samples per audit");
  CLI::Option* odepth = verify->add_option("--depth", depth, "invariance trajectory depth");
  CLI::Option* oseed = verify->add_option("--seed", seed, "audit RNG seed");
  verify->add_option("--trace-words", vopts.trace_words, "trace equivalence word count");
  verify->add_option("--trace-length", vopts.trace_length, "trace equivalence word length");
  verify->add_option("--report", vopts.report_path, "report path (default next to artifact)");

  CLI::App* export_dfm = app.add_subcommand("export-dfm", "print the quotient machine as dot");
  export_dfm->add_option("artifact", artifact_path, "artifact file")->required();

  CLI::App* export_geometry =
      app.add_subcommand("export-geometry", "print class geometry as JSON");
  export_geometry->add_option("artifact", artifact_path, "artifact file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    fub::CommandOutcome outcome;
    if (analyze->parsed()) {
      outcome = fub::cmd_analyze(spec_path);
    } else if (compute->parsed()) {
      if (*omin) copts.min_classes = min_classes;
      if (*oeps) copts.epsilon = epsilon;
      if (*okmax) copts.k_max = k_max;
      outcome = fub::cmd_compute(spec_path, copts);
    } else if (verify->parsed()) {
      if (*osamples) vopts.samples = samples;
      if (*odepth) vopts.depth = depth;
      if (*oseed) vopts.seed = seed;
      outcome = fub::cmd_verify(artifact_path, spec_path, vopts);
    } else if (export_dfm->parsed()) {
      outcome = fub::cmd_export_dfm(artifact_path);
    } else if (export_geometry->parsed()) {
      outcome = fub::cmd_export_geometry(artifact_path);
    }
    return outcome.exit_code;
  } catch (const fub::SpecError& e) {
    std::cerr << "spec error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
