#pragma once

#include <string>

#include "fub/bisim.hpp"
#include "fub/verify.hpp"

namespace fub {

struct LoadedArtifact {
  FiniteUniformBisimulation fub;
  std::string spec_digest;
};

/// Self-describing artifact ("fub-artifact/1"): embeds the system, the
/// transform, provenance and all classes, so verification never recomputes
/// the Schur step. Byte-deterministic for fixed inputs.
std::string artifact_to_json(const FiniteUniformBisimulation& fub, const std::string& spec_digest);
LoadedArtifact artifact_from_json(const std::string& text);

/// Geometry export ("fub-geometry/1"): one record per class with cells and,
/// for planar systems, parallelogram vertex lists.
std::string geometry_to_json(const FiniteUniformBisimulation& fub, const std::string& spec_digest);

std::string audit_report_to_json(const AuditReport& report);

}  // namespace fub
