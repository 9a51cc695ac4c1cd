#include "fub/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fub/dfm.hpp"
#include "fub/io.hpp"
#include "fub/verify.hpp"
#include "fub/version.hpp"
#include "json_util.hpp"

namespace fub {

namespace {

using detail::ojson;
namespace fs = std::filesystem;

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ojson hypothesis_to_json(const HypothesisReport& hyp) {
  ojson out;
  out["rho"] = hyp.rho;
  out["schur_stable"] = hyp.schur_stable;
  out["zero_in_alphabet"] = hyp.zero_in_alphabet;
  out["invertible"] = hyp.invertible;
  out["smallest_singular"] = hyp.smallest_singular;
  out["multi_letter"] = hyp.multi_letter;
  return out;
}

ojson separation_to_json(const SeparationReport& sep) {
  ojson out;
  out["verdict"] = to_string(sep.verdict);
  out["reach_bound"] = sep.reach_bound;
  out["a_norm"] = sep.a_norm;
  out["min_margin"] = sep.min_margin;
  ojson pairs = ojson::array();
  for (const auto& p : sep.pairs) {
    ojson jp;
    jp["letters"] = {p.j1, p.j2};
    jp["gap"] = p.gap;
    jp["margin"] = p.margin;
    pairs.push_back(std::move(jp));
  }
  out["pairs"] = std::move(pairs);
  return out;
}

ojson audit_to_json_value(const AuditReport& report) {
  return ojson::parse(audit_report_to_json(report));
}

void apply_verify_overrides(RunConfig& cfg, const VerifyOptions& opts) {
  if (opts.samples.has_value()) cfg.sample_count = *opts.samples;
  if (opts.depth.has_value()) cfg.trajectory_depth = *opts.depth;
  if (opts.seed.has_value()) cfg.seed = *opts.seed;
}

ojson provenance_summary(const FiniteUniformBisimulation& fub) {
  ojson out;
  const Provenance& prov = fub.provenance();
  out["algorithm"] = to_string(prov.algorithm);
  out["k_tilde"] = prov.k_tilde;
  if (prov.algorithm == Algorithm::PartitionSplit) {
    out["partition_index"] = prov.partition_index;
    out["partition_mask"] = prov.partition_mask;
  } else {
    out["eta"] = prov.eta;
    out["separation_inconclusive"] = prov.separation_inconclusive;
  }
  out["d"] = prov.d;
  out["l_k_tilde"] = prov.l_k_tilde;
  out["h"] = prov.h;
  out["kappa"] = fub.transform().kappa;
  out["norm_certificate"] = fub.transform().norm_certificate;
  out["rho"] = fub.transform().rho;
  out["epsilon"] = fub.transform().epsilon;
  out["radius"] = fub.radius();
  out["class_count"] = fub.class_count();
  return out;
}

/// Re-derives the separation distance d at the recorded depth from a fresh
/// enumeration, plus the transform certificate, and compares both at 1e-9
/// relative tolerance.
ojson recheck_certificates(const FiniteUniformBisimulation& fub, const RunConfig& cfg) {
  const SystemSpec& sys = fub.system();
  const SimilarityTransform& tr = fub.transform();
  const Provenance& prov = fub.provenance();
  ojson out;

  const double rho = spectral_radius(sys.A);
  const double certificate = induced_one_norm(tr.T_inv * sys.A * tr.T);
  const bool cert_ok = certificate <= (rho + tr.epsilon) * (1.0 + 1e-9);
  out["norm_certificate_recomputed"] = certificate;
  out["norm_certificate_bound"] = rho + tr.epsilon;
  out["norm_certificate_pass"] = cert_ok;

  ForcedResponseEnumerator enumerator(sys, cfg.tuple_budget);
  double d = 0.0;
  if (prov.algorithm == Algorithm::PartitionSplit) {
    const auto partitions = enumerate_binary_partitions(sys.q());
    const auto& part = partitions.at(static_cast<std::size_t>(prov.partition_index));
    if (part.mask != prov.partition_mask) throw FormatError("partition index/mask mismatch");
    const auto [c1, c2] = enumerator.partition_classes(prov.k_tilde, part);
    d = min_cross_distance(c1.points, c2.points);
  } else {
    d = min_cross_distance(enumerator.per_letter_classes(prov.k_tilde));
  }
  const auto norms = power_norm_sequence(sys.A, prov.k_tilde);
  const double l_k = sys.input_norm_max * norms.back();
  const double kappa = 2.0 * tr.T_norm * tr.T_inv_norm / (1.0 - rho - tr.epsilon);
  const bool d_matches = std::abs(d - prov.d) <= 1e-9 * std::max(1.0, std::abs(prov.d));
  const bool threshold_ok = d >= kappa * l_k * (1.0 - 1e-9);
  out["d_recomputed"] = d;
  out["d_stored"] = prov.d;
  out["d_pass"] = d_matches;
  out["l_k_recomputed"] = l_k;
  out["kappa_recomputed"] = kappa;
  out["threshold_pass"] = threshold_ok;
  out["pass"] = cert_ok && d_matches && threshold_ok;
  return out;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << contents;
}

CommandOutcome cmd_analyze(const std::string& spec_path) {
  CommandOutcome outcome;
  outcome.command = "analyze";
  const std::string text = read_file(spec_path);
  const ParsedSpec parsed = parse_spec(text);
  outcome.spec_digest = digest_string(text);

  const HypothesisReport hyp = validate_hypotheses(parsed.system);
  const NecessaryConditionReport ncr = necessary_condition_report(parsed.system);

  ojson summary;
  summary["command"] = "analyze";
  summary["tool_version"] = kToolVersion;
  summary["spec"] = spec_path;
  summary["spec_digest"] = outcome.spec_digest;
  summary["timestamp"] = timestamp_utc();
  summary["n"] = parsed.system.n;
  summary["m"] = parsed.system.m;
  summary["q"] = parsed.system.q();
  summary["h"] = parsed.system.input_norm_max;
  summary["hypotheses"] = hypothesis_to_json(hyp);

  std::cout << "spec:            " << spec_path << " (" << outcome.spec_digest << ")\n";
  std::cout << "dimensions:      n=" << parsed.system.n << " m=" << parsed.system.m
            << " q=" << parsed.system.q() << "\n";
  std::cout << "spectral radius: " << hyp.rho << (hyp.schur_stable ? "  (Schur stable)" : "") << "\n";
  std::cout << "max ||Bu||_1:    " << parsed.system.input_norm_max << "\n";
  std::cout << "0 in alphabet:   " << (hyp.zero_in_alphabet ? "yes" : "no") << "\n";
  std::cout << "A invertible:    " << (hyp.invertible ? "yes" : "no")
            << "  (sigma_min = " << hyp.smallest_singular << ")\n";

  if (hyp.schur_stable) {
    const double reach = reach_norm_bound(parsed.system);
    const SeparationReport sep = input_separation_check(parsed.system);
    summary["reach_norm_bound"] = reach;
    summary["separation"] = separation_to_json(sep);
    std::cout << "reach bound R:   " << reach << "\n";
    std::cout << "letter images:   " << to_string(sep.verdict)
              << " (min margin " << sep.min_margin << ")\n";
  } else {
    std::cout << "reach bound R:   n/a (not Schur stable)\n";
  }

  if (ncr.warn) {
    summary["necessary_condition_warning"] = ncr.message;
    std::cout << "warning:         " << ncr.message << "\n";
    if (!ncr.caveat.empty()) {
      summary["necessary_condition_caveat"] = ncr.caveat;
      std::cout << "note:            " << ncr.caveat << "\n";
    }
  }

  outcome.summary_json = summary.dump(2);
  std::cout << "--- summary ---\n" << outcome.summary_json << "\n";
  return outcome;
}

CommandOutcome cmd_compute(const std::string& spec_path, const ComputeOptions& opts) {
  CommandOutcome outcome;
  outcome.command = "compute";
  const std::string text = read_file(spec_path);
  ParsedSpec parsed = parse_spec(text);
  outcome.spec_digest = digest_string(text);

  RunConfig cfg = parsed.config;
  if (opts.min_classes.has_value()) cfg.min_classes = *opts.min_classes;
  if (opts.epsilon.has_value()) cfg.epsilon = *opts.epsilon;
  if (opts.k_max.has_value()) cfg.k_max = *opts.k_max;

  const HypothesisReport hyp = validate_hypotheses(parsed.system);
  const bool gate = hyp.schur_stable && (opts.algorithm == 1 || hyp.invertible);
  if (!gate && !opts.force) {
    std::ostringstream msg;
    msg << "hypothesis gate failed:";
    if (!hyp.schur_stable) msg << " spectral radius " << hyp.rho << " is not < 1;";
    if (opts.algorithm == 2 && !hyp.invertible) msg << " A is not invertible;";
    msg << " rerun with --force to attempt anyway";
    throw std::runtime_error(msg.str());
  }

  FiniteUniformBisimulation fub = opts.algorithm == 1 ? algorithm1(parsed.system, cfg)
                                                      : algorithm2(parsed.system, cfg);
  const Dfm dfm = build_dfm(parsed.system, fub);

  fs::create_directories(opts.out_dir);
  const auto emit = [&](const std::string& name, const std::string& contents) {
    const std::string path = (fs::path(opts.out_dir) / name).string();
    write_file(path, contents);
    outcome.outputs.push_back(path);
  };
  emit("fub.json", artifact_to_json(fub, outcome.spec_digest));
  emit("geometry.json", geometry_to_json(fub, outcome.spec_digest));
  emit("dfm.dot", "// spec: " + outcome.spec_digest + "\n" + export_graph(dfm));
  emit("dfm.tsv", "# spec: " + outcome.spec_digest + "\n" + export_transition_table(dfm));

  ojson summary;
  summary["command"] = "compute";
  summary["tool_version"] = kToolVersion;
  summary["spec"] = spec_path;
  summary["spec_digest"] = outcome.spec_digest;
  summary["timestamp"] = timestamp_utc();
  summary["algorithm"] = opts.algorithm;
  summary["epsilon_auto"] = cfg.epsilon_is_auto();
  summary["epsilon_resolved"] = fub.transform().epsilon;
  summary["forced_gate"] = !gate;
  summary["provenance"] = provenance_summary(fub);
  summary["dfm_states"] = dfm.state_count;
  summary["outputs"] = outcome.outputs;
  outcome.summary_json = summary.dump(2);
  emit("summary.json", outcome.summary_json + "\n");

  std::cout << "classes:   " << fub.class_count() << " (algorithm " << opts.algorithm << ")\n";
  std::cout << "k_tilde:   " << fub.provenance().k_tilde << "\n";
  std::cout << "d:         " << fub.provenance().d << "\n";
  std::cout << "kappa*l_k: " << fub.transform().kappa * fub.provenance().l_k_tilde << "\n";
  std::cout << "radius:    " << fub.radius() << "\n";
  std::cout << "outputs under " << opts.out_dir << "\n";
  return outcome;
}

CommandOutcome cmd_verify(const std::string& artifact_path, const std::string& spec_path,
                          const VerifyOptions& opts) {
  CommandOutcome outcome;
  outcome.command = "verify";
  const std::string spec_text = read_file(spec_path);
  const ParsedSpec parsed = parse_spec(spec_text);
  outcome.spec_digest = digest_string(spec_text);

  LoadedArtifact loaded = artifact_from_json(read_file(artifact_path));
  if (loaded.spec_digest != outcome.spec_digest)
    throw DigestMismatch(loaded.spec_digest, outcome.spec_digest);

  RunConfig cfg = parsed.config;
  apply_verify_overrides(cfg, opts);

  const FiniteUniformBisimulation& fub = loaded.fub;
  const SystemSpec& sys = fub.system();

  std::vector<AuditReport> audits;
  audits.push_back(check_invariance(sys, fub, cfg));
  audits.push_back(check_uniformity(sys, fub, cfg));
  audits.push_back(check_disjointness(fub, cfg));
  // A corrupt artifact can make the quotient ill-defined; report that as a
  // failing trace audit rather than aborting the remaining checks.
  try {
    const Dfm dfm = build_dfm(sys, fub);
    audits.push_back(
        check_trace_equivalence(sys, fub, dfm, opts.trace_words, opts.trace_length, cfg.seed));
  } catch (const NotWellDefined& e) {
    AuditReport report;
    report.property = "trace-equivalence";
    report.seed = cfg.seed;
    report.note = std::string("quotient construction failed: ") + e.what();
    AuditWitness w;
    w.label_a = e.class_id();
    w.letter = e.letter();
    w.detail = e.what();
    report.violations.push_back(std::move(w));
    audits.push_back(std::move(report));
  } catch (const UnclassifiableSuccessor& e) {
    AuditReport report;
    report.property = "trace-equivalence";
    report.seed = cfg.seed;
    report.note = std::string("quotient construction failed: ") + e.what();
    AuditWitness w;
    w.label_a = e.class_id();
    w.letter = e.letter();
    w.detail = e.what();
    report.violations.push_back(std::move(w));
    audits.push_back(std::move(report));
  }

  const ojson certificates = recheck_certificates(fub, cfg);

  bool all_pass = certificates.at("pass").get<bool>();
  ojson jaudits = ojson::array();
  for (const auto& report : audits) {
    all_pass = all_pass && report.pass();
    jaudits.push_back(audit_to_json_value(report));
    std::cout << (report.pass() ? "PASS " : "FAIL ") << report.property << " (" << report.samples
              << " samples, " << report.violations.size() << " violations, "
              << report.elapsed_seconds << " s)" << (report.note.empty() ? "" : "  [" + report.note + "]")
              << "\n";
  }
  std::cout << (certificates.at("pass").get<bool>() ? "PASS " : "FAIL ")
            << "certificates (norm bound + separation distance recheck)\n";

  ojson summary;
  summary["command"] = "verify";
  summary["tool_version"] = kToolVersion;
  summary["artifact"] = artifact_path;
  summary["spec"] = spec_path;
  summary["spec_digest"] = outcome.spec_digest;
  summary["timestamp"] = timestamp_utc();
  summary["seed"] = cfg.seed;
  summary["samples"] = cfg.sample_count;
  summary["trajectory_depth"] = cfg.trajectory_depth;
  summary["trace_words"] = opts.trace_words;
  summary["trace_length"] = opts.trace_length;
  summary["audits"] = std::move(jaudits);
  summary["certificates"] = certificates;
  summary["overall_pass"] = all_pass;
  outcome.summary_json = summary.dump(2);

  const std::string report_path =
      opts.report_path.empty()
          ? (fs::path(artifact_path).parent_path() / "verify-report.json").string()
          : opts.report_path;
  write_file(report_path, outcome.summary_json + "\n");
  outcome.outputs.push_back(report_path);
  outcome.exit_code = all_pass ? 0 : 1;
  std::cout << (all_pass ? "OVERALL PASS" : "OVERALL FAIL") << " -> " << report_path << "\n";
  return outcome;
}

CommandOutcome cmd_export_dfm(const std::string& artifact_path) {
  CommandOutcome outcome;
  outcome.command = "export-dfm";
  LoadedArtifact loaded = artifact_from_json(read_file(artifact_path));
  outcome.spec_digest = loaded.spec_digest;
  const Dfm dfm = build_dfm(loaded.fub.system(), loaded.fub);
  std::cout << export_graph(dfm);
  return outcome;
}

CommandOutcome cmd_export_geometry(const std::string& artifact_path) {
  CommandOutcome outcome;
  outcome.command = "export-geometry";
  LoadedArtifact loaded = artifact_from_json(read_file(artifact_path));
  outcome.spec_digest = loaded.spec_digest;
  std::cout << geometry_to_json(loaded.fub, loaded.spec_digest);
  return outcome;
}

}  // namespace fub
