#include "fub/sysmodel.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "fub/linalg.hpp"

namespace fub {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kSpecFormat = "fub-spec/1";

bool bitwise_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) return false;
  return std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<size_t>(a.size())) == 0;
}

[[noreturn]] void fail(const std::string& locator, const std::string& message) {
  throw SpecError(locator, message);
}

/// Numeric literal: a JSON number, or a string holding a decimal or an
/// exact rational "p/q".
double number_at(const json& j, const std::string& locator) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    const auto slash = s.find('/');
    try {
      size_t used = 0;
      if (slash == std::string::npos) {
        const double v = std::stod(s, &used);
        if (used != s.size()) fail(locator, "trailing characters in numeric literal '" + s + "'");
        return v;
      }
      const double num = std::stod(s.substr(0, slash), &used);
      if (used != slash) fail(locator, "malformed rational '" + s + "'");
      const std::string den_str = s.substr(slash + 1);
      const double den = std::stod(den_str, &used);
      if (used != den_str.size()) fail(locator, "malformed rational '" + s + "'");
      if (den == 0.0) fail(locator, "rational with zero denominator '" + s + "'");
      return num / den;
    } catch (const SpecError&) {
      throw;
    } catch (const std::exception&) {
      fail(locator, "cannot parse numeric literal '" + s + "'");
    }
  }
  fail(locator, "expected a number or a rational string");
}

Eigen::MatrixXd matrix_at(const json& j, int rows, int cols, const std::string& locator) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    fail(locator, "expected " + std::to_string(rows) + " rows");
  Eigen::MatrixXd out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const json& row = j[static_cast<size_t>(r)];
    const std::string row_loc = locator + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      fail(row_loc, "expected " + std::to_string(cols) + " entries");
    for (int c = 0; c < cols; ++c)
      out(r, c) = number_at(row[static_cast<size_t>(c)], row_loc + "[" + std::to_string(c) + "]");
  }
  return out;
}

int int_at(const json& j, const std::string& locator) {
  if (!j.is_number_integer()) fail(locator, "expected an integer");
  return j.get<int>();
}

json matrix_to_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (int r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace

SystemSpec SystemSpec::create(Eigen::MatrixXd A, Eigen::MatrixXd B,
                              std::vector<Eigen::VectorXd> letters) {
  SystemSpec sys;
  sys.n = static_cast<int>(A.rows());
  sys.m = static_cast<int>(B.cols());
  if (sys.n < 1) fail("A", "state dimension must be positive");
  if (sys.m < 1) fail("B", "input dimension must be positive");
  if (A.cols() != sys.n) fail("A", "must be square");
  if (B.rows() != sys.n) fail("B", "row count must match the state dimension");
  if (!A.allFinite()) fail("A", "entries must be finite");
  if (!B.allFinite()) fail("B", "entries must be finite");
  if (letters.empty()) fail("U", "alphabet must contain at least one letter");
  for (size_t j = 0; j < letters.size(); ++j) {
    const std::string loc = "U[" + std::to_string(j) + "]";
    if (letters[j].size() != sys.m) fail(loc, "letter dimension must match the input dimension");
    if (!letters[j].allFinite()) fail(loc, "entries must be finite");
    for (size_t i = 0; i < j; ++i) {
      if (bitwise_equal(letters[i], letters[j]))
        fail(loc, "duplicate alphabet letter (same as U[" + std::to_string(i) + "])");
    }
  }
  sys.A = std::move(A);
  sys.B = std::move(B);
  sys.letters = std::move(letters);

  Eigen::EigenSolver<Eigen::MatrixXd> solver(sys.A, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw NumericError("eigenvalue iteration failed to converge for A");
  sys.eigenvalues = solver.eigenvalues();
  sys.rho = sys.eigenvalues.cwiseAbs().maxCoeff();

  sys.input_images.resize(sys.n, sys.q());
  for (int j = 0; j < sys.q(); ++j) sys.input_images.col(j) = sys.B * sys.letters[static_cast<size_t>(j)];
  sys.input_norm_max = 0.0;
  for (int j = 0; j < sys.q(); ++j)
    sys.input_norm_max = std::max(sys.input_norm_max, sys.input_images.col(j).lpNorm<1>());
  return sys;
}

double RunConfig::resolve_epsilon(double rho) const {
  if (!epsilon.has_value()) {
    if (rho >= 1.0)
      throw SpecError("options.epsilon",
                      "cannot resolve 'auto': spectral radius " + std::to_string(rho) +
                          " is not < 1");
    return (1.0 - rho) / 2.0;
  }
  const double e = *epsilon;
  if (!(e > 0.0) || !(e < 1.0 - rho))
    throw SpecError("options.epsilon",
                    "epsilon " + std::to_string(e) + " outside the valid range (0, " +
                        std::to_string(1.0 - rho) + ") for spectral radius " + std::to_string(rho));
  return e;
}

ParsedSpec parse_spec(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail("", std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("", "top level must be an object");
  if (!doc.contains("format")) fail("format", "missing required field");
  if (doc["format"] != kSpecFormat)
    fail("format", "unsupported format '" + doc["format"].dump() + "', expected \"" +
                       kSpecFormat + "\"");
  for (const char* key : {"n", "m", "A", "B", "U"})
    if (!doc.contains(key)) fail(key, "missing required field");

  const int n = int_at(doc["n"], "n");
  const int m = int_at(doc["m"], "m");
  if (n < 1) fail("n", "must be a positive integer");
  if (m < 1) fail("m", "must be a positive integer");

  Eigen::MatrixXd A = matrix_at(doc["A"], n, n, "A");
  Eigen::MatrixXd B = matrix_at(doc["B"], n, m, "B");

  if (!doc["U"].is_array() || doc["U"].empty()) fail("U", "expected a nonempty list of letters");
  std::vector<Eigen::VectorXd> letters;
  letters.reserve(doc["U"].size());
  for (size_t j = 0; j < doc["U"].size(); ++j) {
    const std::string loc = "U[" + std::to_string(j) + "]";
    Eigen::MatrixXd row = matrix_at(json::array({doc["U"][j]}), 1, m, loc);
    letters.push_back(row.row(0).transpose());
  }

  SystemSpec sys = SystemSpec::create(std::move(A), std::move(B), std::move(letters));

  RunConfig cfg;
  if (doc.contains("options")) {
    const json& opts = doc["options"];
    if (!opts.is_object()) fail("options", "expected an object");
    for (const auto& [key, value] : opts.items()) {
      const std::string loc = "options." + key;
      if (key == "epsilon") {
        if (value.is_string() && value.get<std::string>() == "auto") {
          cfg.epsilon.reset();
        } else {
          cfg.epsilon = number_at(value, loc);
        }
      } else if (key == "k_max") {
        cfg.k_max = int_at(value, loc);
        if (cfg.k_max < 1) fail(loc, "must be a positive integer");
      } else if (key == "min_classes") {
        cfg.min_classes = int_at(value, loc);
        if (cfg.min_classes < 1) fail(loc, "must be a positive integer");
      } else if (key == "sample_count") {
        cfg.sample_count = int_at(value, loc);
        if (cfg.sample_count < 1) fail(loc, "must be a positive integer");
      } else if (key == "trajectory_depth") {
        cfg.trajectory_depth = int_at(value, loc);
        if (cfg.trajectory_depth < 1) fail(loc, "must be a positive integer");
      } else if (key == "seed") {
        if (!value.is_number_unsigned() && !value.is_number_integer())
          fail(loc, "expected an integer");
        cfg.seed = value.get<std::uint64_t>();
      } else if (key == "membership_tol") {
        cfg.membership_tol = number_at(value, loc);
        if (cfg.membership_tol < 0.0) fail(loc, "must be nonnegative");
      } else if (key == "slack_tol") {
        cfg.slack_tol = number_at(value, loc);
        if (cfg.slack_tol < 0.0) fail(loc, "must be nonnegative");
      } else if (key == "tuple_budget") {
        if (!value.is_number_unsigned() && !value.is_number_integer())
          fail(loc, "expected an integer");
        const auto budget = value.get<long long>();
        if (budget < 1) fail(loc, "must be a positive integer");
        cfg.tuple_budget = static_cast<std::uint64_t>(budget);
      } else if (key == "transform") {
        if (!value.is_null()) cfg.transform_override = matrix_at(value, sys.n, sys.n, loc);
      } else {
        fail(loc, "unknown option");
      }
    }
  }

  // An explicitly pinned epsilon must already be admissible for this A.
  if (cfg.epsilon.has_value()) (void)cfg.resolve_epsilon(sys.rho);

  return ParsedSpec{std::move(sys), std::move(cfg)};
}

std::string serialize_spec(const SystemSpec& sys, const RunConfig& cfg) {
  json doc;
  doc["format"] = kSpecFormat;
  doc["n"] = sys.n;
  doc["m"] = sys.m;
  doc["A"] = matrix_to_json(sys.A);
  doc["B"] = matrix_to_json(sys.B);
  json letters = json::array();
  for (const auto& u : sys.letters) letters.push_back(vector_to_json(u));
  doc["U"] = std::move(letters);

  json opts;
  if (cfg.epsilon.has_value())
    opts["epsilon"] = *cfg.epsilon;
  else
    opts["epsilon"] = "auto";
  opts["k_max"] = cfg.k_max;
  opts["min_classes"] = cfg.min_classes;
  opts["sample_count"] = cfg.sample_count;
  opts["trajectory_depth"] = cfg.trajectory_depth;
  opts["seed"] = cfg.seed;
  opts["membership_tol"] = cfg.membership_tol;
  opts["slack_tol"] = cfg.slack_tol;
  opts["tuple_budget"] = cfg.tuple_budget;
  if (cfg.transform_override.has_value()) opts["transform"] = matrix_to_json(*cfg.transform_override);
  doc["options"] = std::move(opts);
  return doc.dump(2) + "\n";
}

HypothesisReport validate_hypotheses(const SystemSpec& sys) {
  HypothesisReport report;
  report.rho = sys.rho;
  report.schur_stable = sys.rho < 1.0;
  report.multi_letter = sys.q() > 1;
  for (const auto& u : sys.letters) {
    if ((u.array() == 0.0).all()) {
      report.zero_in_alphabet = true;
      break;
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.A);
  report.smallest_singular = svd.singularValues().minCoeff();
  report.invertible = report.smallest_singular > 1e-12 * induced_one_norm(sys.A);
  return report;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string digest_string(std::string_view bytes) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

}  // namespace fub
