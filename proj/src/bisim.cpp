#include "fub/bisim.hpp"

#include <cmath>
#include <string>

#include "fub/errors.hpp"

namespace fub {

namespace {

Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& A, int k) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(A.rows(), A.cols());
  for (int i = 0; i < k; ++i) P = P * A;
  return P;
}

}  // namespace

const char* to_string(Algorithm a) {
  return a == Algorithm::PartitionSplit ? "partition-split" : "per-letter-refine";
}

FiniteUniformBisimulation::FiniteUniformBisimulation(
    SystemSpec sys, SimilarityTransform transform, std::vector<PointMatrix> base_clouds,
    double radius, int eta, std::vector<EquivalenceClass> classes, Provenance provenance,
    double membership_tol)
    : sys_(std::move(sys)),
      transform_(std::move(transform)),
      base_clouds_(std::move(base_clouds)),
      radius_(radius),
      eta_(eta),
      classes_(std::move(classes)),
      provenance_(provenance),
      membership_tol_(membership_tol) {
  if (classes_.size() < 2)
    throw NumericError("a finite uniform bisimulation needs more than one class");
  if (!(radius_ > 0.0) || !std::isfinite(radius_))
    throw NumericError("class radius must be positive and finite");
  if (eta_ < 0) throw NumericError("refinement depth must be nonnegative");
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    const auto& cls = classes_[i];
    if (cls.id != static_cast<int>(i)) throw NumericError("class ids must be 0..N-1 in order");
    if (cls.base < 0 || cls.base >= static_cast<int>(base_clouds_.size()))
      throw NumericError("class references a missing base cloud");
    if (base_clouds_[static_cast<std::size_t>(cls.base)].cols() == 0)
      throw NumericError("base cloud is empty");
    if (cls.offset.size() != sys_.n) throw NumericError("class offset has wrong dimension");
  }

  // Termination certificate, re-checked from the stored raw values.
  if (provenance_.d < transform_.kappa * provenance_.l_k_tilde)
    throw NumericError("termination certificate violated: d < kappa * l_k");

  // Analytic disjointness of the base classes: every cross-cloud distance
  // is at least d.
  for (std::size_t i = 0; i < base_clouds_.size(); ++i) {
    for (std::size_t j = i + 1; j < base_clouds_.size(); ++j) {
      const double dist = min_cross_distance(base_clouds_[i], base_clouds_[j]);
      if (dist < provenance_.d * (1.0 - 1e-9))
        throw NumericError("base clouds closer than the certified separation distance");
    }
  }

  eta_map_ = matrix_power(sys_.A, eta_);
  if (eta_ >= 1) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(eta_map_);
    if (!(svd.singularValues().minCoeff() > 1e-12 * induced_one_norm(eta_map_)))
      throw NotInvertible("refinement map A^eta is numerically singular");
    eta_lu_ = std::make_shared<Eigen::PartialPivLU<Eigen::MatrixXd>>(eta_map_);
  }
}

bool FiniteUniformBisimulation::member(int class_id, const Eigen::VectorXd& x) const {
  const EquivalenceClass& cls = classes_[static_cast<std::size_t>(class_id)];
  Eigen::VectorXd y = x - cls.offset;
  if (eta_ >= 1) y = eta_lu_->solve(y);
  const PointMatrix& cloud = base_clouds_[static_cast<std::size_t>(cls.base)];
  const Eigen::MatrixXd& Ti = transform_.T_inv;
  const int n = sys_.n;
  const double bound = radius_ - membership_tol_;
  const double* yd = y.data();
  const double* cd = cloud.data();
  for (Eigen::Index c = 0; c < cloud.cols(); ++c, cd += n) {
    // ||T^-1 (y - c)||_1, row by row, columns ascending
    double dist = 0.0;
    for (int r = 0; r < n; ++r) {
      double s = 0.0;
      for (int cc = 0; cc < n; ++cc) s += Ti(r, cc) * (yd[cc] - cd[cc]);
      dist += std::abs(s);
    }
    if (dist < bound) return true;
  }
  return false;
}

std::optional<int> FiniteUniformBisimulation::classify(const Eigen::VectorXd& x) const {
  for (const auto& cls : classes_)
    if (member(cls.id, x)) return cls.id;
  return std::nullopt;
}

std::vector<Eigen::VectorXd> FiniteUniformBisimulation::mapped_centers(int class_id) const {
  const EquivalenceClass& cls = classes_[static_cast<std::size_t>(class_id)];
  const PointMatrix& cloud = base_clouds_[static_cast<std::size_t>(cls.base)];
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(cloud.cols()));
  for (Eigen::Index c = 0; c < cloud.cols(); ++c)
    out.push_back(cls.offset + eta_map_ * cloud.col(c));
  return out;
}

Eigen::VectorXd FiniteUniformBisimulation::sample_cell_point(int class_id, SampleRng& rng,
                                                             double scale) const {
  const EquivalenceClass& cls = classes_[static_cast<std::size_t>(class_id)];
  const PointMatrix& cloud = base_clouds_[static_cast<std::size_t>(cls.base)];
  const Eigen::Index pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(cloud.cols())));
  const Eigen::VectorXd b = rng.l1_ball_point(sys_.n, radius_ * scale);
  const Eigen::VectorXd y = cloud.col(pick) + transform_.T * b;
  return cls.offset + eta_map_ * y;
}

Eigen::VectorXd FiniteUniformBisimulation::sample_point(int class_id, SampleRng& rng) const {
  return sample_cell_point(class_id, rng);
}

std::vector<FiniteUniformBisimulation::Cell> FiniteUniformBisimulation::class_geometry(
    int class_id, bool with_vertices) const {
  if (with_vertices && sys_.n != 2)
    throw NumericError("parallelogram vertex export is planar only (n = " +
                       std::to_string(sys_.n) + ")");
  const EquivalenceClass& cls = classes_[static_cast<std::size_t>(class_id)];
  const PointMatrix& cloud = base_clouds_[static_cast<std::size_t>(cls.base)];
  const Eigen::VectorXd& w = cls.offset;
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(cloud.cols()));
  for (Eigen::Index c = 0; c < cloud.cols(); ++c) {
    Cell cell;
    cell.center = cloud.col(c);
    cell.radius = radius_;
    cell.offset = w;
    if (with_vertices) {
      for (int axis = 0; axis < sys_.n; ++axis)
        cell.vertices.push_back(w + eta_map_ * (cell.center + radius_ * transform_.T.col(axis)));
      for (int axis = 0; axis < sys_.n; ++axis)
        cell.vertices.push_back(w + eta_map_ * (cell.center - radius_ * transform_.T.col(axis)));
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

namespace {

SimilarityTransform make_transform(const SystemSpec& sys, const RunConfig& cfg, double epsilon) {
  if (cfg.transform_override.has_value())
    return certify_transform(sys.A, epsilon, *cfg.transform_override);
  return build_transform(sys.A, epsilon);
}

}  // namespace

FiniteUniformBisimulation algorithm1(const SystemSpec& sys, const RunConfig& cfg) {
  if (sys.q() < 2)
    throw AlphabetTooSmall("the two-class construction needs at least two letters");
  const double epsilon = cfg.resolve_epsilon(sys.rho);
  SimilarityTransform tr = make_transform(sys, cfg, epsilon);
  const auto partitions = enumerate_binary_partitions(sys.q());
  ForcedResponseEnumerator enumerator(sys, cfg.tuple_budget);
  const double h = sys.input_norm_max;

  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(sys.n, sys.n);
  for (int k = 1; k <= cfg.k_max; ++k) {
    P = P * sys.A;
    if (!P.allFinite()) throw NumericError("matrix power overflow in the separation loop");
    const double l_k = h * induced_one_norm(P);
    for (const BinaryPartition& part : partitions) {
      auto [c1, c2] = enumerator.partition_classes(k, part);
      const double d = min_cross_distance(c1.points, c2.points);
      if (d > 0.0 && d >= tr.kappa * l_k * (1.0 + cfg.slack_tol)) {
        Provenance prov;
        prov.algorithm = Algorithm::PartitionSplit;
        prov.k_tilde = k;
        prov.partition_index = part.index;
        prov.partition_mask = part.mask;
        prov.eta = 0;
        prov.d = d;
        prov.l_k_tilde = l_k;
        prov.h = h;
        const double radius = d / (2.0 * tr.T_norm);
        std::vector<PointMatrix> bases{std::move(c1.points), std::move(c2.points)};
        std::vector<EquivalenceClass> classes(2);
        for (int i = 0; i < 2; ++i) {
          classes[static_cast<std::size_t>(i)].id = i;
          classes[static_cast<std::size_t>(i)].base = i;
          classes[static_cast<std::size_t>(i)].offset = Eigen::VectorXd::Zero(sys.n);
        }
        return FiniteUniformBisimulation(sys, std::move(tr), std::move(bases), radius, 0,
                                         std::move(classes), prov, cfg.membership_tol);
      }
    }
  }
  throw NoSeparationWithinBudget(cfg.k_max);
}

FiniteUniformBisimulation algorithm2(const SystemSpec& sys, const RunConfig& cfg) {
  if (sys.q() < 2)
    throw AlphabetTooSmall("the per-letter construction needs at least two letters");
  const double epsilon = cfg.resolve_epsilon(sys.rho);
  const HypothesisReport hyp = validate_hypotheses(sys);
  if (!hyp.invertible)
    throw NotInvertible("the per-letter construction requires an invertible A");
  const SeparationReport separation = input_separation_check(sys);

  SimilarityTransform tr = make_transform(sys, cfg, epsilon);
  ForcedResponseEnumerator enumerator(sys, cfg.tuple_budget);
  const double h = sys.input_norm_max;

  int k_tilde = -1;
  double d = 0.0, l_k_tilde = 0.0;
  std::vector<PrefixClass> letter_classes;
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(sys.n, sys.n);
  for (int k = 1; k <= cfg.k_max; ++k) {
    P = P * sys.A;
    if (!P.allFinite()) throw NumericError("matrix power overflow in the separation loop");
    const double l_k = h * induced_one_norm(P);
    letter_classes = enumerator.per_letter_classes(k);
    const double d_k = min_cross_distance(letter_classes);
    if (d_k > 0.0 && d_k >= tr.kappa * l_k * (1.0 + cfg.slack_tol)) {
      k_tilde = k;
      d = d_k;
      l_k_tilde = l_k;
      break;
    }
  }
  if (k_tilde < 0) throw NoSeparationWithinBudget(cfg.k_max);

  // Smallest eta >= 0 with q^{eta+1} > z.
  const std::uint64_t q = static_cast<std::uint64_t>(sys.q());
  const std::uint64_t z = static_cast<std::uint64_t>(cfg.min_classes);
  int eta = 0;
  std::uint64_t class_count = q;
  while (class_count <= z) {
    if (class_count > cfg.tuple_budget / q) throw BudgetExceeded(eta + 1, cfg.tuple_budget);
    class_count *= q;
    ++eta;
  }

  Provenance prov;
  prov.algorithm = Algorithm::PerLetterRefine;
  prov.k_tilde = k_tilde;
  prov.eta = eta;
  prov.d = d;
  prov.l_k_tilde = l_k_tilde;
  prov.h = h;
  prov.separation_inconclusive =
      separation.verdict == SeparationReport::Verdict::Inconclusive;

  const double radius = d / (2.0 * tr.T_norm);
  std::vector<PointMatrix> bases;
  bases.reserve(static_cast<std::size_t>(sys.q()));
  for (auto& cls : letter_classes) bases.push_back(std::move(cls.points));

  // Refining tuples in lexicographic order (first digit most significant),
  // crossed with the base classes: id = tuple_rank * q + base.
  std::vector<Eigen::MatrixXd> power_images(static_cast<std::size_t>(eta));
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(sys.n, sys.n);
  for (int j = 0; j < eta; ++j) {
    power_images[static_cast<std::size_t>(j)] = power * sys.input_images;  // A^j * B * U
    power = power * sys.A;
  }

  std::uint64_t tuple_count = 1;
  for (int j = 0; j < eta; ++j) tuple_count *= q;

  std::vector<EquivalenceClass> classes;
  classes.reserve(static_cast<std::size_t>(class_count));
  for (std::uint64_t rank = 0; rank < tuple_count; ++rank) {
    std::vector<int> tuple(static_cast<std::size_t>(eta));
    std::uint64_t rem = rank;
    for (int j = eta - 1; j >= 0; --j) {
      tuple[static_cast<std::size_t>(j)] = static_cast<int>(rem % q);
      rem /= q;
    }
    Eigen::VectorXd offset = Eigen::VectorXd::Zero(sys.n);
    for (int j = 0; j < eta; ++j)
      offset += power_images[static_cast<std::size_t>(j)].col(tuple[static_cast<std::size_t>(j)]);
    for (int base = 0; base < sys.q(); ++base) {
      EquivalenceClass cls;
      cls.id = static_cast<int>(rank * q + static_cast<std::uint64_t>(base));
      cls.base = base;
      cls.tuple = tuple;
      cls.offset = offset;
      classes.push_back(std::move(cls));
    }
  }

  return FiniteUniformBisimulation(sys, std::move(tr), std::move(bases), radius, eta,
                                   std::move(classes), prov, cfg.membership_tol);
}

}  // namespace fub
