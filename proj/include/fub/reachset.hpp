#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "fub/sysmodel.hpp"

namespace fub {

/// Point clouds are stored column-wise (n x N), columns in canonical order:
/// lexicographic in the generating input tuple under alphabet order, first
/// occurrence kept on deduplication.
using PointMatrix = Eigen::MatrixXd;

/// A binary split of the alphabet. Canonical form keeps the first letter in
/// side 1; partitions are ordered by the ascending bitmask of side-1 letters.
struct BinaryPartition {
  int index = 0;        ///< position in the canonical enumeration
  std::uint32_t mask = 0;  ///< bit j set <=> letter j in side 1 (bit 0 always set)
  std::vector<int> side1;
  std::vector<int> side2;
};

/// All 2^{q-1} - 1 binary partitions in canonical order. Throws
/// AlphabetTooSmall for q < 2.
std::vector<BinaryPartition> enumerate_binary_partitions(int q);

struct LetterConstraint {
  int letter = 0;
};
struct PartitionConstraint {
  int partition_index = 0;
  int side = 0;  ///< 1 or 2
};

/// Depth-k forced-response points whose first input is constrained to a
/// single letter or to one side of a binary partition.
struct PrefixClass {
  int depth = 0;
  std::variant<LetterConstraint, PartitionConstraint> constraint;
  PointMatrix points;
};

/// Enumerates depth-k forced-response clouds with exact (bitwise)
/// deduplication, memoizing the unconstrained cloud per depth. Depth k is
/// admitted only while q^k stays within the generating-tuple budget.
class ForcedResponseEnumerator {
 public:
  ForcedResponseEnumerator(const SystemSpec& sys, std::uint64_t tuple_budget);

  /// Unconstrained cloud at exact depth k (all q^k tuples, deduplicated).
  const PointMatrix& depth_cloud(int k);

  /// One class per alphabet letter, letter order canonical.
  std::vector<PrefixClass> per_letter_classes(int k);

  /// The two clouds of a binary partition at depth k.
  std::pair<PrefixClass, PrefixClass> partition_classes(int k, const BinaryPartition& p);

  const SystemSpec& system() const { return sys_; }

 private:
  void check_budget(int k) const;
  PointMatrix constrained_cloud(int k, const std::vector<int>& first_letters);

  const SystemSpec& sys_;
  std::uint64_t tuple_budget_;
  std::vector<PointMatrix> levels_;  ///< levels_[k-1] = depth-k cloud
};

/// Exact minimum 1-norm distance over all cross-class point pairs.
/// OpenMP-chunked scan; the reduction is a plain min, so the result is
/// bit-identical to the serial reference for any thread count.
double min_cross_distance(const PointMatrix& a, const PointMatrix& b);
double min_cross_distance(const std::vector<PrefixClass>& classes);

/// Serial reference implementations, kept for tests and the benchmark.
double min_cross_distance_serial(const PointMatrix& a, const PointMatrix& b);

/// out.col(j) = offset + M * in.col(j); fixed accumulation order so the
/// parallel kernel is bit-identical to the serial one.
void affine_map_cloud(const Eigen::MatrixXd& M, const Eigen::VectorXd& offset,
                      const PointMatrix& in, PointMatrix& out);
void affine_map_cloud_serial(const Eigen::MatrixXd& M, const Eigen::VectorXd& offset,
                             const PointMatrix& in, PointMatrix& out);

/// Keep-first exact deduplication of columns, preserving first-occurrence
/// order. Exposed for tests.
PointMatrix dedup_columns(const PointMatrix& pts);

/// Sound one-sided disjointness check for the one-step reach sets
/// B u_j + cl(A * reach): pair (j, j') is separated when
/// ||B u_j - B u_{j'}||_1 > 2 ||A||_1 R with R the reach norm bound.
/// Never certifies falsely; may be inconclusive.
struct SeparationReport {
  enum class Verdict { DisjointCertified, Inconclusive };
  struct PairMargin {
    int j1 = 0, j2 = 0;
    double gap = 0.0;     ///< ||B u_j1 - B u_j2||_1
    double margin = 0.0;  ///< gap - 2 ||A||_1 R
  };
  double reach_bound = 0.0;  ///< R
  double a_norm = 0.0;       ///< ||A||_1
  std::vector<PairMargin> pairs;
  double min_margin = 0.0;  ///< +inf when there are no pairs
  Verdict verdict = Verdict::Inconclusive;
};

SeparationReport input_separation_check(const SystemSpec& sys);

const char* to_string(SeparationReport::Verdict v);

/// Debug dump of the depth-k cloud: one row per surviving point in
/// canonical order, first generating tuple as a string column, then the
/// coordinates, tab separated. Enumerates all q^k tuples (budget checked).
std::string dump_cloud_table(const SystemSpec& sys, int k, std::uint64_t tuple_budget);

}  // namespace fub
