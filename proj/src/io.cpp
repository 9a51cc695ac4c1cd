#include "fub/io.hpp"

#include <string>

#include "fub/errors.hpp"
#include "fub/version.hpp"
#include "json_util.hpp"

namespace fub {

namespace {

using detail::matrix_from_json;
using detail::matrix_to_json;
using detail::ojson;
using detail::vector_from_json;
using detail::vector_to_json;

constexpr const char* kArtifactFormat = "fub-artifact/1";
constexpr const char* kGeometryFormat = "fub-geometry/1";

ojson transform_to_json(const SimilarityTransform& tr) {
  ojson out;
  out["T"] = matrix_to_json(tr.T);
  out["T_inv"] = matrix_to_json(tr.T_inv);
  out["epsilon"] = tr.epsilon;
  out["rho"] = tr.rho;
  out["norm_certificate"] = tr.norm_certificate;
  out["kappa"] = tr.kappa;
  return out;
}

ojson provenance_to_json(const Provenance& prov) {
  ojson out;
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
  return out;
}

}  // namespace

std::string artifact_to_json(const FiniteUniformBisimulation& fub,
                             const std::string& spec_digest) {
  const SystemSpec& sys = fub.system();
  ojson doc;
  doc["format"] = kArtifactFormat;
  doc["tool_version"] = kToolVersion;
  doc["spec_digest"] = spec_digest;

  ojson system;
  system["n"] = sys.n;
  system["m"] = sys.m;
  system["A"] = matrix_to_json(sys.A);
  system["B"] = matrix_to_json(sys.B);
  ojson letters = ojson::array();
  for (const auto& u : sys.letters) letters.push_back(vector_to_json(u));
  system["U"] = std::move(letters);
  doc["system"] = std::move(system);

  doc["membership_tol"] = fub.membership_tol();
  doc["transform"] = transform_to_json(fub.transform());
  doc["provenance"] = provenance_to_json(fub.provenance());
  doc["radius"] = fub.radius();
  doc["eta"] = fub.eta();

  ojson clouds = ojson::array();
  for (const auto& cloud : fub.base_clouds()) {
    ojson pts = ojson::array();
    for (Eigen::Index c = 0; c < cloud.cols(); ++c) pts.push_back(vector_to_json(cloud.col(c)));
    clouds.push_back(std::move(pts));
  }
  doc["base_clouds"] = std::move(clouds);

  ojson classes = ojson::array();
  for (const auto& cls : fub.classes()) {
    ojson c;
    c["id"] = cls.id;
    c["base"] = cls.base;
    c["tuple"] = cls.tuple;
    c["offset"] = vector_to_json(cls.offset);
    classes.push_back(std::move(c));
  }
  doc["classes"] = std::move(classes);
  return doc.dump(2) + "\n";
}

LoadedArtifact artifact_from_json(const std::string& text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("artifact is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format") != kArtifactFormat)
      throw FormatError("unsupported artifact format " + doc.at("format").dump());

    const ojson& jsys = doc.at("system");
    std::vector<Eigen::VectorXd> letters;
    for (const auto& ju : jsys.at("U")) letters.push_back(vector_from_json(ju));
    SystemSpec sys = SystemSpec::create(matrix_from_json(jsys.at("A")),
                                        matrix_from_json(jsys.at("B")), std::move(letters));

    // The transform is taken exactly as stored (verification re-derives the
    // certificates from it); only the inverse-quality gate is re-checked.
    const ojson& jtr = doc.at("transform");
    SimilarityTransform tr;
    tr.T = matrix_from_json(jtr.at("T"));
    tr.T_inv = matrix_from_json(jtr.at("T_inv"));
    tr.epsilon = jtr.at("epsilon").get<double>();
    tr.rho = jtr.at("rho").get<double>();
    tr.norm_certificate = jtr.at("norm_certificate").get<double>();
    tr.T_norm = induced_one_norm(tr.T);
    tr.T_inv_norm = induced_one_norm(tr.T_inv);
    tr.kappa = 2.0 * tr.T_norm * tr.T_inv_norm / (1.0 - tr.rho - tr.epsilon);
    const double quality = induced_one_norm(
        tr.T * tr.T_inv - Eigen::MatrixXd::Identity(sys.n, sys.n));
    if (quality > 1e-9)
      throw FormatError("artifact transform fails the inverse quality gate");

    const ojson& jprov = doc.at("provenance");
    Provenance prov;
    const std::string algo = jprov.at("algorithm").get<std::string>();
    if (algo == to_string(Algorithm::PartitionSplit)) {
      prov.algorithm = Algorithm::PartitionSplit;
      prov.partition_index = jprov.at("partition_index").get<int>();
      prov.partition_mask = jprov.at("partition_mask").get<std::uint32_t>();
    } else if (algo == to_string(Algorithm::PerLetterRefine)) {
      prov.algorithm = Algorithm::PerLetterRefine;
      prov.eta = jprov.at("eta").get<int>();
      prov.separation_inconclusive = jprov.at("separation_inconclusive").get<bool>();
    } else {
      throw FormatError("unknown algorithm tag " + algo);
    }
    prov.k_tilde = jprov.at("k_tilde").get<int>();
    prov.d = jprov.at("d").get<double>();
    prov.l_k_tilde = jprov.at("l_k_tilde").get<double>();
    prov.h = jprov.at("h").get<double>();

    std::vector<PointMatrix> clouds;
    for (const auto& jcloud : doc.at("base_clouds")) {
      PointMatrix cloud(sys.n, static_cast<Eigen::Index>(jcloud.size()));
      for (Eigen::Index c = 0; c < cloud.cols(); ++c)
        cloud.col(c) = vector_from_json(jcloud.at(static_cast<std::size_t>(c)));
      clouds.push_back(std::move(cloud));
    }

    std::vector<EquivalenceClass> classes;
    for (const auto& jcls : doc.at("classes")) {
      EquivalenceClass cls;
      cls.id = jcls.at("id").get<int>();
      cls.base = jcls.at("base").get<int>();
      cls.tuple = jcls.at("tuple").get<std::vector<int>>();
      cls.offset = vector_from_json(jcls.at("offset"));
      classes.push_back(std::move(cls));
    }

    FiniteUniformBisimulation fub(std::move(sys), std::move(tr), std::move(clouds),
                                  doc.at("radius").get<double>(), doc.at("eta").get<int>(),
                                  std::move(classes), prov,
                                  doc.at("membership_tol").get<double>());
    return LoadedArtifact{std::move(fub), doc.at("spec_digest").get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("artifact is missing required fields: ") + e.what());
  }
}

std::string geometry_to_json(const FiniteUniformBisimulation& fub,
                             const std::string& spec_digest) {
  ojson doc;
  doc["format"] = kGeometryFormat;
  doc["tool_version"] = kToolVersion;
  doc["spec_digest"] = spec_digest;
  doc["transform"] = transform_to_json(fub.transform());
  doc["provenance"] = provenance_to_json(fub.provenance());
  doc["radius"] = fub.radius();
  doc["eta"] = fub.eta();
  doc["refinement_map"] = matrix_to_json(fub.refinement_map());

  const bool planar = fub.system().n == 2;
  ojson classes = ojson::array();
  for (const auto& cls : fub.classes()) {
    ojson jc;
    jc["id"] = cls.id;
    jc["tuple"] = cls.tuple;
    jc["offset"] = vector_to_json(cls.offset);
    ojson cells = ojson::array();
    for (const auto& cell : fub.class_geometry(cls.id, planar)) {
      ojson jcell;
      jcell["center"] = vector_to_json(cell.center);
      jcell["radius"] = cell.radius;
      if (planar) {
        ojson verts = ojson::array();
        for (const auto& v : cell.vertices) verts.push_back(vector_to_json(v));
        jcell["vertices"] = std::move(verts);
      }
      cells.push_back(std::move(jcell));
    }
    jc["cells"] = std::move(cells);
    classes.push_back(std::move(jc));
  }
  doc["classes"] = std::move(classes);
  return doc.dump(2) + "\n";
}

std::string audit_report_to_json(const AuditReport& report) {
  ojson doc;
  doc["property"] = report.property;
  doc["samples"] = report.samples;
  doc["pass"] = report.pass();
  doc["seed"] = report.seed;
  doc["elapsed_seconds"] = report.elapsed_seconds;
  if (!report.note.empty()) doc["note"] = report.note;
  ojson violations = ojson::array();
  for (const auto& w : report.violations) {
    ojson jw;
    jw["sample_index"] = w.sample_index;
    if (w.point.size() > 0) jw["point"] = vector_to_json(w.point);
    if (w.second_point.has_value()) jw["second_point"] = vector_to_json(*w.second_point);
    if (w.letter >= 0) jw["letter"] = w.letter;
    if (w.label_a.has_value()) jw["label_a"] = *w.label_a;
    if (w.label_b.has_value()) jw["label_b"] = *w.label_b;
    jw["detail"] = w.detail;
    violations.push_back(std::move(jw));
  }
  doc["violations"] = std::move(violations);
  return doc.dump(2);
}

}  // namespace fub
