#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fub/bisim.hpp"
#include "fub/sysmodel.hpp"

namespace fixtures {

inline Eigen::VectorXd v2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

inline Eigen::VectorXd v3(double a, double b, double c) {
  Eigen::VectorXd v(3);
  v << a, b, c;
  return v;
}

/// Upper-triangular contractive planar system with a five-letter alphabet.
inline fub::SystemSpec triangular2d() {
  Eigen::MatrixXd A(2, 2);
  A << 0.25, -0.15, 0.0, 0.1;
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(2, 2);
  return fub::SystemSpec::create(
      A, B, {v2(1, 0), v2(-1, 0), v2(0, 1), v2(0, -1), v2(0, 0)});
}

/// Rank-deficient planar system: the second coordinate is wiped each step.
inline fub::SystemSpec deadbeat2d() {
  Eigen::MatrixXd A(2, 2);
  A << 0.5, 0.0, 0.0, 0.0;
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(2, 2);
  return fub::SystemSpec::create(A, B, {v2(1, 0), v2(0, 1), v2(0, -1), v2(0, 0)});
}

/// Same alphabet with the diagonal swapped: the first coordinate dies.
inline fub::SystemSpec deadbeat2d_swapped() {
  Eigen::MatrixXd A(2, 2);
  A << 0.0, 0.0, 0.0, 0.5;
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(2, 2);
  return fub::SystemSpec::create(A, B, {v2(1, 0), v2(0, 1), v2(0, -1), v2(0, 0)});
}

/// Expanding first coordinate, contracting second, input pinned to zero.
inline fub::SystemSpec expanding2d() {
  Eigen::MatrixXd A(2, 2);
  A << 2.0, 0.0, 0.0, 0.5;
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(2, 2);
  return fub::SystemSpec::create(A, B, {v2(0, 0)});
}

/// Unstable three-dimensional system carrying the recorded non-uniform
/// partition witness; single-letter alphabet so the witness letter is the
/// only transition.
inline fub::SystemSpec unstable3d_single() {
  Eigen::MatrixXd A(3, 3);
  A << 2, 0, -1, -1, -7, 11, 0, 4, 6;
  Eigen::MatrixXd B(3, 2);
  B << 1, 2, 1, 1, 1, 1;
  Eigen::VectorXd u(2);
  u << 0, 60;
  return fub::SystemSpec::create(A, B, {u});
}

/// Horizontal strips X0 = {1 < |y| < 2}, X1 = {|y| < 1}. Under
/// (x, y) -> (2x, y/2) with zero input both strips flow into X1, giving a
/// regular two-class relation despite the expanding x-axis.
class StripPartition : public fub::StatePartition {
 public:
  int class_count() const override { return 2; }

  std::optional<int> classify(const Eigen::VectorXd& x) const override {
    const double ay = std::abs(x[1]);
    if (ay > 1.0 && ay < 2.0) return 0;
    if (ay < 1.0) return 1;
    return std::nullopt;
  }

  std::vector<Eigen::VectorXd> skeleton(int class_id) const override {
    if (class_id == 0) return {v2(0, 1.5), v2(0, -1.5), v2(2, 1.2), v2(-3, -1.9)};
    return {v2(0, 0), v2(1, 0.5), v2(-2, -0.9)};
  }

  Eigen::VectorXd sample_point(int class_id, fub::SampleRng& rng) const override {
    const double x = 6.0 * rng.uniform() - 3.0;
    if (class_id == 0) {
      const double y = 1.001 + 0.998 * rng.uniform();
      return v2(x, rng.sign() * y);
    }
    return v2(x, rng.sign() * 0.999 * rng.uniform());
  }
};

/// Exact-membership partition over finitely many listed points. Classifies
/// by equality, so integer-valued dynamics stay inside the fixture.
class PointPartition : public fub::StatePartition {
 public:
  explicit PointPartition(std::vector<std::vector<Eigen::VectorXd>> classes)
      : classes_(std::move(classes)) {}

  int class_count() const override { return static_cast<int>(classes_.size()); }

  std::optional<int> classify(const Eigen::VectorXd& x) const override {
    for (std::size_t c = 0; c < classes_.size(); ++c)
      for (const auto& p : classes_[c])
        if (p.size() == x.size() && (p.array() == x.array()).all())
          return static_cast<int>(c);
    return std::nullopt;
  }

  std::vector<Eigen::VectorXd> skeleton(int class_id) const override {
    return classes_[static_cast<std::size_t>(class_id)];
  }

  Eigen::VectorXd sample_point(int class_id, fub::SampleRng& rng) const override {
    const auto& pts = classes_[static_cast<std::size_t>(class_id)];
    return pts[rng.below(pts.size())];
  }

 private:
  std::vector<std::vector<Eigen::VectorXd>> classes_;
};

/// Eight classes; class 0 holds the pair that separates under the letter
/// (0, 60), class 1 holds one of their successors.
inline PointPartition non_uniform_partition() {
  std::vector<std::vector<Eigen::VectorXd>> classes;
  classes.push_back({v3(1, -2, -3), v3(8, -18, -24), v3(160, -86, -156)});
  classes.push_back({v3(125, 40, 34)});
  for (int i = 0; i < 6; ++i) classes.push_back({v3(1000 + i, 0, 0)});
  return PointPartition(std::move(classes));
}

}  // namespace fixtures
