#pragma once

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fub/linalg.hpp"
#include "fub/reachset.hpp"
#include "fub/rng.hpp"
#include "fub/sysmodel.hpp"

namespace fub {

/// What the quotient construction and the auditors need from a candidate
/// equivalence relation: a total classifier over its classes, interior
/// representatives, and a sampler. FiniteUniformBisimulation implements
/// this; hand-built fixtures in the tests implement it too.
class StatePartition {
 public:
  virtual ~StatePartition() = default;
  virtual int class_count() const = 0;
  /// The unique class containing x, or nullopt.
  virtual std::optional<int> classify(const Eigen::VectorXd& x) const = 0;
  /// Finitely many interior representatives spanning the class.
  virtual std::vector<Eigen::VectorXd> skeleton(int class_id) const = 0;
  /// A point of the class, strictly interior.
  virtual Eigen::VectorXd sample_point(int class_id, SampleRng& rng) const = 0;
};

/// One equivalence class of a constructed bisimulation: the affine image
///   offset + A^eta * (cloud + T * open-ball(radius))
/// of a base prefix cloud. `base` indexes the shared base clouds; `tuple`
/// is the refining input word (empty when eta = 0).
struct EquivalenceClass {
  int id = 0;
  int base = 0;
  std::vector<int> tuple;
  Eigen::VectorXd offset;
};

enum class Algorithm { PartitionSplit, PerLetterRefine };

struct Provenance {
  Algorithm algorithm = Algorithm::PartitionSplit;
  int k_tilde = 0;
  int partition_index = -1;      ///< PartitionSplit only
  std::uint32_t partition_mask = 0;
  int eta = 0;                   ///< PerLetterRefine only
  double d = 0.0;                ///< certified separation distance
  double l_k_tilde = 0.0;
  double h = 0.0;
  bool separation_inconclusive = false;  ///< advisory pre-check outcome
};

/// A finite uniform bisimulation: >= 2 pairwise-disjoint classes, each a
/// finite union of open cells, with the termination certificate
/// d >= kappa * l_{k_tilde} re-checked at construction.
class FiniteUniformBisimulation : public StatePartition {
 public:
  FiniteUniformBisimulation(SystemSpec sys, SimilarityTransform transform,
                            std::vector<PointMatrix> base_clouds, double radius, int eta,
                            std::vector<EquivalenceClass> classes, Provenance provenance,
                            double membership_tol);

  const SystemSpec& system() const { return sys_; }
  const SimilarityTransform& transform() const { return transform_; }
  const std::vector<PointMatrix>& base_clouds() const { return base_clouds_; }
  const std::vector<EquivalenceClass>& classes() const { return classes_; }
  double radius() const { return radius_; }
  int eta() const { return eta_; }
  const Provenance& provenance() const { return provenance_; }
  double membership_tol() const { return membership_tol_; }
  const Eigen::MatrixXd& refinement_map() const { return eta_map_; }

  /// Membership predicate of a single class (strict inequality; the cells
  /// are open). Exposed so the disjointness audit can re-test pairs.
  bool member(int class_id, const Eigen::VectorXd& x) const;

  /// Base centers mapped through the class refinement; these are the
  /// representatives the quotient construction agrees over.
  std::vector<Eigen::VectorXd> mapped_centers(int class_id) const;

  // StatePartition interface.
  int class_count() const override { return static_cast<int>(classes_.size()); }
  std::optional<int> classify(const Eigen::VectorXd& x) const override;
  std::vector<Eigen::VectorXd> skeleton(int class_id) const override {
    return mapped_centers(class_id);
  }
  Eigen::VectorXd sample_point(int class_id, SampleRng& rng) const override;

  /// Interior sample: uniform center choice, then offset + A^eta (c + T b)
  /// with b in the open 1-norm ball of radius * scale.
  Eigen::VectorXd sample_cell_point(int class_id, SampleRng& rng, double scale = 0.999) const;

  /// One geometry cell per base center: the affine image
  /// {M (c + T b) + w : ||b||_1 < radius}. Vertices (2n per cell) are
  /// filled only for n = 2; requesting them elsewhere throws.
  struct Cell {
    Eigen::VectorXd center;
    double radius = 0.0;
    Eigen::VectorXd offset;
    std::vector<Eigen::VectorXd> vertices;
  };
  std::vector<Cell> class_geometry(int class_id, bool with_vertices) const;

  /// Mutable handle for fault-injection tests and artifact loading.
  void override_radius(double r) { radius_ = r; }

 private:
  SystemSpec sys_;
  SimilarityTransform transform_;
  std::vector<PointMatrix> base_clouds_;
  double radius_ = 0.0;
  int eta_ = 0;
  std::vector<EquivalenceClass> classes_;
  Provenance provenance_;
  double membership_tol_ = 0.0;
  Eigen::MatrixXd eta_map_;  ///< A^eta
  std::shared_ptr<Eigen::PartialPivLU<Eigen::MatrixXd>> eta_lu_;  ///< cached, eta >= 1 only
};

/// Two-class construction: scans depths k = 1..k_max and all binary
/// partitions in canonical order; the first (k, i) with
/// d_k^{(i)} >= kappa * l_k * (1 + slack_tol) and d > 0 wins.
FiniteUniformBisimulation algorithm1(const SystemSpec& sys, const RunConfig& cfg);

/// Per-letter construction refined to q^{eta+1} > z classes, eta minimal
/// (eta = 0 returns the base classes). Requires A invertible.
FiniteUniformBisimulation algorithm2(const SystemSpec& sys, const RunConfig& cfg);

/// Free-function form of the classifier (kept for API symmetry).
inline std::optional<int> classify(const FiniteUniformBisimulation& fub,
                                   const Eigen::VectorXd& x) {
  return fub.classify(x);
}

const char* to_string(Algorithm a);

}  // namespace fub
