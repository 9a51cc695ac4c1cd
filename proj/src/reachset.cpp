#include "fub/reachset.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fub/linalg.hpp"

namespace fub {

namespace {

/// Keep-first exact dedup: open addressing over the FNV-1a hash of the
/// point bytes, presized so no rehash happens mid-stream. Insertion order
/// is the canonical order of the surviving points.
class CanonicalPointSet {
 public:
  CanonicalPointSet(int dim, std::size_t expected) : dim_(dim) {
    std::size_t cap = 16;
    while (cap < expected * 2 + 1) cap <<= 1;
    slots_.assign(cap, kEmpty);
    mask_ = cap - 1;
    storage_.reserve(expected * static_cast<std::size_t>(dim));
  }

  void insert(const double* p) {
    const std::size_t bytes = sizeof(double) * static_cast<std::size_t>(dim_);
    std::uint64_t h = 0xcbf29ce484222325ull;
    const auto* raw = reinterpret_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < bytes; ++i) {
      h ^= raw[i];
      h *= 0x100000001b3ull;
    }
    std::size_t idx = static_cast<std::size_t>(h) & mask_;
    while (slots_[idx] != kEmpty) {
      const double* existing =
          storage_.data() + static_cast<std::size_t>(slots_[idx]) * static_cast<std::size_t>(dim_);
      if (std::memcmp(existing, p, bytes) == 0) return;
      idx = (idx + 1) & mask_;
    }
    slots_[idx] = static_cast<std::uint32_t>(count_);
    storage_.insert(storage_.end(), p, p + dim_);
    ++count_;
  }

  PointMatrix take() const {
    PointMatrix out(dim_, static_cast<Eigen::Index>(count_));
    if (count_ > 0)
      std::memcpy(out.data(), storage_.data(), storage_.size() * sizeof(double));
    return out;
  }

  std::size_t size() const { return count_; }

 private:
  static constexpr std::uint32_t kEmpty = 0xffffffffu;
  int dim_;
  std::vector<double> storage_;
  std::vector<std::uint32_t> slots_;
  std::size_t mask_ = 0;
  std::size_t count_ = 0;
};

double pair_distance(const double* a, const double* b, int n) {
  double acc = 0.0;
  for (int c = 0; c < n; ++c) acc += std::abs(a[c] - b[c]);
  return acc;
}

}  // namespace

std::vector<BinaryPartition> enumerate_binary_partitions(int q) {
  if (q < 2)
    throw AlphabetTooSmall("binary partitions need at least two letters (q = " +
                           std::to_string(q) + ")");
  if (q > 31) throw std::length_error("alphabet too large for partition bitmasks");
  const std::uint32_t full = (1u << q) - 1u;
  std::vector<BinaryPartition> out;
  out.reserve((1u << (q - 1)) - 1u);
  // Masks with bit 0 set, ascending, excluding the full set.
  for (std::uint32_t mask = 1; mask < full; mask += 2) {
    BinaryPartition p;
    p.index = static_cast<int>(out.size());
    p.mask = mask;
    for (int j = 0; j < q; ++j) {
      if (mask & (1u << j))
        p.side1.push_back(j);
      else
        p.side2.push_back(j);
    }
    out.push_back(std::move(p));
  }
  return out;
}

void affine_map_cloud(const Eigen::MatrixXd& M, const Eigen::VectorXd& offset,
                      const PointMatrix& in, PointMatrix& out) {
  const int n = static_cast<int>(M.rows());
  const Eigen::Index N = in.cols();
  out.resize(n, N);
  const double* src = in.data();
  double* dst = out.data();
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < N; ++j) {
    const double* p = src + j * n;
    double* o = dst + j * n;
    for (int r = 0; r < n; ++r) {
      double s = offset[r];
      for (int c = 0; c < n; ++c) s += M(r, c) * p[c];
      o[r] = s;
    }
  }
}

void affine_map_cloud_serial(const Eigen::MatrixXd& M, const Eigen::VectorXd& offset,
                             const PointMatrix& in, PointMatrix& out) {
  const int n = static_cast<int>(M.rows());
  const Eigen::Index N = in.cols();
  out.resize(n, N);
  const double* src = in.data();
  double* dst = out.data();
  for (Eigen::Index j = 0; j < N; ++j) {
    const double* p = src + j * n;
    double* o = dst + j * n;
    for (int r = 0; r < n; ++r) {
      double s = offset[r];
      for (int c = 0; c < n; ++c) s += M(r, c) * p[c];
      o[r] = s;
    }
  }
}

PointMatrix dedup_columns(const PointMatrix& pts) {
  CanonicalPointSet set(static_cast<int>(pts.rows()), static_cast<std::size_t>(pts.cols()));
  for (Eigen::Index j = 0; j < pts.cols(); ++j) set.insert(pts.col(j).data());
  return set.take();
}

ForcedResponseEnumerator::ForcedResponseEnumerator(const SystemSpec& sys,
                                                   std::uint64_t tuple_budget)
    : sys_(sys), tuple_budget_(tuple_budget) {}

void ForcedResponseEnumerator::check_budget(int k) const {
  if (k < 1) throw std::invalid_argument("enumeration depth must be >= 1");
  std::uint64_t tuples = 1;
  for (int i = 0; i < k; ++i) {
    if (tuples > tuple_budget_ / static_cast<std::uint64_t>(sys_.q()))
      throw BudgetExceeded(k, tuple_budget_);
    tuples *= static_cast<std::uint64_t>(sys_.q());
  }
  if (tuples > tuple_budget_) throw BudgetExceeded(k, tuple_budget_);
}

const PointMatrix& ForcedResponseEnumerator::depth_cloud(int k) {
  check_budget(k);
  while (static_cast<int>(levels_.size()) < k) {
    const int level = static_cast<int>(levels_.size()) + 1;
    if (level == 1) {
      levels_.push_back(dedup_columns(sys_.input_images));
      continue;
    }
    const PointMatrix& prev = levels_[static_cast<std::size_t>(level - 2)];
    CanonicalPointSet set(sys_.n,
                          static_cast<std::size_t>(prev.cols()) * static_cast<std::size_t>(sys_.q()));
    PointMatrix mapped;
    for (int j = 0; j < sys_.q(); ++j) {
      affine_map_cloud(sys_.A, sys_.input_images.col(j), prev, mapped);
      for (Eigen::Index c = 0; c < mapped.cols(); ++c) set.insert(mapped.col(c).data());
    }
    levels_.push_back(set.take());
  }
  return levels_[static_cast<std::size_t>(k - 1)];
}

PointMatrix ForcedResponseEnumerator::constrained_cloud(int k, const std::vector<int>& first) {
  if (k == 1) {
    PointMatrix cols(sys_.n, static_cast<Eigen::Index>(first.size()));
    for (std::size_t i = 0; i < first.size(); ++i)
      cols.col(static_cast<Eigen::Index>(i)) = sys_.input_images.col(first[i]);
    return dedup_columns(cols);
  }
  const PointMatrix& prev = depth_cloud(k - 1);
  CanonicalPointSet set(sys_.n,
                        static_cast<std::size_t>(prev.cols()) * first.size());
  PointMatrix mapped;
  for (int j : first) {
    affine_map_cloud(sys_.A, sys_.input_images.col(j), prev, mapped);
    for (Eigen::Index c = 0; c < mapped.cols(); ++c) set.insert(mapped.col(c).data());
  }
  return set.take();
}

std::vector<PrefixClass> ForcedResponseEnumerator::per_letter_classes(int k) {
  check_budget(k);
  std::vector<PrefixClass> out;
  out.reserve(static_cast<std::size_t>(sys_.q()));
  for (int j = 0; j < sys_.q(); ++j) {
    PrefixClass cls;
    cls.depth = k;
    cls.constraint = LetterConstraint{j};
    cls.points = constrained_cloud(k, {j});
    out.push_back(std::move(cls));
  }
  return out;
}

std::pair<PrefixClass, PrefixClass> ForcedResponseEnumerator::partition_classes(
    int k, const BinaryPartition& p) {
  check_budget(k);
  PrefixClass c1, c2;
  c1.depth = c2.depth = k;
  c1.constraint = PartitionConstraint{p.index, 1};
  c2.constraint = PartitionConstraint{p.index, 2};
  c1.points = constrained_cloud(k, p.side1);
  c2.points = constrained_cloud(k, p.side2);
  return {std::move(c1), std::move(c2)};
}

double min_cross_distance(const PointMatrix& a, const PointMatrix& b) {
  if (a.cols() == 0 || b.cols() == 0)
    throw std::invalid_argument("min_cross_distance: empty point cloud");
  const int n = static_cast<int>(a.rows());
  const Eigen::Index na = a.cols(), nb = b.cols();
  const double* pa = a.data();
  const double* pb = b.data();
  double best = std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(min : best)
  for (Eigen::Index i = 0; i < na; ++i) {
    const double* ca = pa + i * n;
    double local = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < nb; ++j) {
      const double dist = pair_distance(ca, pb + j * n, n);
      if (dist < local) local = dist;
    }
    if (local < best) best = local;
  }
  return best;
}

double min_cross_distance_serial(const PointMatrix& a, const PointMatrix& b) {
  if (a.cols() == 0 || b.cols() == 0)
    throw std::invalid_argument("min_cross_distance: empty point cloud");
  const int n = static_cast<int>(a.rows());
  const double* pa = a.data();
  const double* pb = b.data();
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    const double* ca = pa + i * n;
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      const double dist = pair_distance(ca, pb + j * n, n);
      if (dist < best) best = dist;
    }
  }
  return best;
}

double min_cross_distance(const std::vector<PrefixClass>& classes) {
  if (classes.size() < 2)
    throw std::invalid_argument("min_cross_distance: need at least two classes");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < classes.size(); ++i)
    for (std::size_t j = i + 1; j < classes.size(); ++j)
      best = std::min(best, min_cross_distance(classes[i].points, classes[j].points));
  return best;
}

SeparationReport input_separation_check(const SystemSpec& sys) {
  SeparationReport report;
  report.reach_bound = reach_norm_bound(sys);
  report.a_norm = induced_one_norm(sys.A);
  const double spread = 2.0 * report.a_norm * report.reach_bound;
  report.min_margin = std::numeric_limits<double>::infinity();
  bool all_positive = true;
  for (int j1 = 0; j1 < sys.q(); ++j1) {
    for (int j2 = j1 + 1; j2 < sys.q(); ++j2) {
      SeparationReport::PairMargin pm;
      pm.j1 = j1;
      pm.j2 = j2;
      pm.gap = (sys.input_images.col(j1) - sys.input_images.col(j2)).lpNorm<1>();
      pm.margin = pm.gap - spread;
      report.min_margin = std::min(report.min_margin, pm.margin);
      all_positive = all_positive && pm.margin > 0.0;
      report.pairs.push_back(pm);
    }
  }
  report.verdict = all_positive ? SeparationReport::Verdict::DisjointCertified
                                : SeparationReport::Verdict::Inconclusive;
  return report;
}

const char* to_string(SeparationReport::Verdict v) {
  return v == SeparationReport::Verdict::DisjointCertified ? "DisjointCertified" : "Inconclusive";
}

std::string dump_cloud_table(const SystemSpec& sys, int k, std::uint64_t tuple_budget) {
  if (k < 1) throw std::invalid_argument("enumeration depth must be >= 1");
  std::uint64_t tuples = 1;
  for (int i = 0; i < k; ++i) {
    if (tuples > tuple_budget / static_cast<std::uint64_t>(sys.q()))
      throw BudgetExceeded(k, tuple_budget);
    tuples *= static_cast<std::uint64_t>(sys.q());
  }
  CanonicalPointSet set(sys.n, static_cast<std::size_t>(tuples));
  std::ostringstream out;
  out.precision(17);
  out << "tuple";
  for (int r = 0; r < sys.n; ++r) out << "\tx" << r;
  out << "\n";
  std::vector<int> digits(static_cast<std::size_t>(k), 0);
  Eigen::VectorXd point(sys.n), scratch(sys.n);
  while (true) {
    point = sys.input_images.col(digits[static_cast<std::size_t>(k - 1)]);
    for (int i = k - 2; i >= 0; --i) {
      for (int r = 0; r < sys.n; ++r) {
        double s = sys.input_images(r, digits[static_cast<std::size_t>(i)]);
        for (int c = 0; c < sys.n; ++c) s += sys.A(r, c) * point[c];
        scratch[r] = s;
      }
      point.swap(scratch);
    }
    const std::size_t before = set.size();
    set.insert(point.data());
    if (set.size() > before) {
      for (int i = 0; i < k; ++i)
        out << (i ? "," : "") << digits[static_cast<std::size_t>(i)];
      for (int r = 0; r < sys.n; ++r) out << "\t" << point[r];
      out << "\n";
    }
    int pos = k - 1;
    while (pos >= 0) {
      if (++digits[static_cast<std::size_t>(pos)] < sys.q()) break;
      digits[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return out.str();
}

}  // namespace fub
