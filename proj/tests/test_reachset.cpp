#include <doctest.h>

#include <algorithm>
#include <random>

#include "fub/linalg.hpp"
#include "fub/reachset.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace fub;

namespace {

bool cloud_equals_oracle(const PointMatrix& got, const std::vector<Eigen::VectorXd>& want) {
  if (got.cols() != static_cast<Eigen::Index>(want.size())) return false;
  for (Eigen::Index c = 0; c < got.cols(); ++c)
    if (!oracles::same_bits(got.col(c), want[static_cast<size_t>(c)])) return false;
  return true;
}

PointMatrix shuffled_columns(const PointMatrix& pts, unsigned seed) {
  std::vector<int> order(static_cast<size_t>(pts.cols()));
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::mt19937 gen(seed);
  std::shuffle(order.begin(), order.end(), gen);
  PointMatrix out(pts.rows(), pts.cols());
  for (Eigen::Index c = 0; c < pts.cols(); ++c) out.col(c) = pts.col(order[static_cast<size_t>(c)]);
  return out;
}

}  // namespace

TEST_CASE("binary partition enumeration") {
  SUBCASE("q=2 has the single split") {
    const auto parts = enumerate_binary_partitions(2);
    REQUIRE(parts.size() == 1);
    CHECK(parts[0].side1 == std::vector<int>{0});
    CHECK(parts[0].side2 == std::vector<int>{1});
  }
  SUBCASE("counts match 2^(q-1) - 1") {
    CHECK(enumerate_binary_partitions(3).size() == 3);
    CHECK(enumerate_binary_partitions(5).size() == 15);
    for (int q = 2; q <= 8; ++q)
      CHECK(enumerate_binary_partitions(q).size() == (1u << (q - 1)) - 1u);
  }
  SUBCASE("canonical order and first-letter rule") {
    const auto parts = enumerate_binary_partitions(4);
    for (size_t i = 0; i < parts.size(); ++i) {
      CHECK(parts[i].index == static_cast<int>(i));
      CHECK((parts[i].mask & 1u) == 1u);
      CHECK(parts[i].side1.front() == 0);
      CHECK_FALSE(parts[i].side2.empty());
      if (i > 0) CHECK(parts[i].mask > parts[i - 1].mask);
    }
  }
  SUBCASE("q=1 rejected") { CHECK_THROWS_AS(enumerate_binary_partitions(1), AlphabetTooSmall); }
}

TEST_CASE("per-letter clouds match the brute-force oracle bit for bit") {
  for (const auto& sys : {fixtures::triangular2d(), fixtures::deadbeat2d()}) {
    ForcedResponseEnumerator enumerator(sys, 1'000'000);
    for (int k = 1; k <= 4; ++k) {
      const auto classes = enumerator.per_letter_classes(k);
      REQUIRE(classes.size() == static_cast<size_t>(sys.q()));
      for (int j = 0; j < sys.q(); ++j) {
        const auto oracle = oracles::brute_force_cloud(sys, k, {j});
        CHECK(cloud_equals_oracle(classes[static_cast<size_t>(j)].points, oracle));
      }
    }
  }
}

TEST_CASE("partition clouds match the brute-force oracle bit for bit") {
  const auto sys = fixtures::triangular2d();
  ForcedResponseEnumerator enumerator(sys, 1'000'000);
  const auto partitions = enumerate_binary_partitions(sys.q());
  for (int k = 1; k <= 3; ++k) {
    for (const auto& part : {partitions.front(), partitions[6], partitions.back()}) {
      const auto [c1, c2] = enumerator.partition_classes(k, part);
      CHECK(cloud_equals_oracle(c1.points, oracles::brute_force_cloud(sys, k, part.side1)));
      CHECK(cloud_equals_oracle(c2.points, oracles::brute_force_cloud(sys, k, part.side2)));
    }
  }
}

TEST_CASE("depth-1 clouds are the letter images") {
  const auto sys = fixtures::triangular2d();
  ForcedResponseEnumerator enumerator(sys, 1000);
  const auto classes = enumerator.per_letter_classes(1);
  for (int j = 0; j < sys.q(); ++j) {
    REQUIRE(classes[static_cast<size_t>(j)].points.cols() == 1);
    CHECK((classes[static_cast<size_t>(j)].points.col(0).array() ==
           sys.input_images.col(j).array())
              .all());
  }
  const auto partitions = enumerate_binary_partitions(sys.q());
  const auto [c1, c2] = enumerator.partition_classes(1, partitions.front());
  CHECK(c1.points.cols() == 1);  // {(1,0)}
  CHECK(c2.points.cols() == 4);
}

TEST_CASE("zero letter yields the zero cloud") {
  SUBCASE("partition side holding only the zero letter") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2) * 0.3;
    Eigen::MatrixXd B = Eigen::MatrixXd::Identity(2, 2);
    const auto sys = SystemSpec::create(A, B, {fixtures::v2(0, 0), fixtures::v2(1, 0)});
    ForcedResponseEnumerator enumerator(sys, 1000);
    const auto [c1, c2] = enumerator.partition_classes(1, enumerate_binary_partitions(2)[0]);
    REQUIRE(c1.points.cols() == 1);
    CHECK(oracles::same_bits(c1.points.col(0), fixtures::v2(0, 0)));
  }
  SUBCASE("single zero-letter alphabet collapses every depth") {
    const auto sys = fixtures::expanding2d();  // U = {0}
    ForcedResponseEnumerator enumerator(sys, 1000);
    for (int k = 1; k <= 4; ++k) {
      const auto classes = enumerator.per_letter_classes(k);
      REQUIRE(classes.size() == 1);
      REQUIRE(classes[0].points.cols() == 1);
      CHECK(oracles::same_bits(classes[0].points.col(0), fixtures::v2(0, 0)));
    }
  }
}

TEST_CASE("deadbeat depth-2 cloud: 8 points in canonical order") {
  const auto sys = fixtures::deadbeat2d();
  ForcedResponseEnumerator enumerator(sys, 1000);
  const PointMatrix& cloud = enumerator.depth_cloud(2);
  REQUIRE(cloud.cols() == 8);
  const std::vector<Eigen::VectorXd> expected = {
      fixtures::v2(1.5, 0), fixtures::v2(1, 0),    fixtures::v2(0.5, 1),  fixtures::v2(0, 1),
      fixtures::v2(0.5, -1), fixtures::v2(0, -1),  fixtures::v2(0.5, 0),  fixtures::v2(0, 0)};
  CHECK(cloud_equals_oracle(cloud, expected));
}

TEST_CASE("one-step recursion: depth k+1 points are B u + A p") {
  for (const auto& sys : {fixtures::triangular2d(), fixtures::deadbeat2d()}) {
    ForcedResponseEnumerator enumerator(sys, 1'000'000);
    for (int k = 1; k <= 3; ++k) {
      const PointMatrix prev = enumerator.depth_cloud(k);
      const PointMatrix next = enumerator.depth_cloud(k + 1);
      // forward: every generated point appears in the next level
      PointMatrix mapped;
      std::vector<Eigen::VectorXd> generated;
      for (int j = 0; j < sys.q(); ++j) {
        affine_map_cloud_serial(sys.A, sys.input_images.col(j), prev, mapped);
        for (Eigen::Index c = 0; c < mapped.cols(); ++c) generated.push_back(mapped.col(c));
      }
      const auto contains = [](const std::vector<Eigen::VectorXd>& hay, const Eigen::VectorXd& p) {
        for (const auto& h : hay)
          if (oracles::same_bits(h, p)) return true;
        return false;
      };
      std::vector<Eigen::VectorXd> next_pts;
      for (Eigen::Index c = 0; c < next.cols(); ++c) next_pts.push_back(next.col(c));
      for (const auto& p : next_pts) CHECK(contains(generated, p));
      for (const auto& p : generated) CHECK(contains(next_pts, p));
    }
  }
}

TEST_CASE("partition-side unions equal per-letter unions at fixed depth") {
  const auto sys = fixtures::triangular2d();
  ForcedResponseEnumerator enumerator(sys, 1'000'000);
  const auto partitions = enumerate_binary_partitions(sys.q());
  for (int k = 1; k <= 3; ++k) {
    const auto letter_classes = enumerator.per_letter_classes(k);
    std::vector<Eigen::VectorXd> letter_union;
    for (const auto& cls : letter_classes)
      for (Eigen::Index c = 0; c < cls.points.cols(); ++c)
        letter_union.push_back(cls.points.col(c));
    for (const auto& part : {partitions[2], partitions[9]}) {
      const auto [c1, c2] = enumerator.partition_classes(k, part);
      std::vector<Eigen::VectorXd> side_union;
      for (const auto* cls : {&c1, &c2})
        for (Eigen::Index c = 0; c < cls->points.cols(); ++c)
          side_union.push_back(cls->points.col(c));
      REQUIRE(side_union.size() == letter_union.size());
      for (const auto& p : side_union) {
        bool found = false;
        for (const auto& r : letter_union)
          if (oracles::same_bits(p, r)) {
            found = true;
            break;
          }
        CHECK(found);
      }
    }
  }
}

TEST_CASE("every enumerated point respects the reach norm bound") {
  for (const auto& sys : {fixtures::triangular2d(), fixtures::deadbeat2d()}) {
    const double bound = reach_norm_bound(sys);
    ForcedResponseEnumerator enumerator(sys, 1'000'000);
    for (int k = 1; k <= 6; ++k) {
      const PointMatrix& cloud = enumerator.depth_cloud(k);
      for (Eigen::Index c = 0; c < cloud.cols(); ++c)
        CHECK(cloud.col(c).lpNorm<1>() <= bound + 1e-9);
    }
  }
}

TEST_CASE("min cross distance") {
  const auto sys = fixtures::triangular2d();
  ForcedResponseEnumerator enumerator(sys, 1000);
  SUBCASE("per-letter depth-1 distance is 1") {
    const auto classes = enumerator.per_letter_classes(1);
    CHECK(min_cross_distance(classes) == 1.0);
    // brute-force oracle over the 10 cross pairs
    double oracle = std::numeric_limits<double>::infinity();
    for (int i = 0; i < sys.q(); ++i)
      for (int j = i + 1; j < sys.q(); ++j)
        oracle = std::min(oracle, (sys.input_images.col(i) - sys.input_images.col(j)).lpNorm<1>());
    CHECK(oracle == 1.0);
  }
  SUBCASE("opposite singletons") {
    PointMatrix a(2, 1), b(2, 1);
    a.col(0) = fixtures::v2(1, 0);
    b.col(0) = fixtures::v2(-1, 0);
    CHECK(min_cross_distance(a, b) == 2.0);
  }
  SUBCASE("shared point gives zero") {
    PointMatrix a(2, 2), b(2, 1);
    a.col(0) = fixtures::v2(1, 1);
    a.col(1) = fixtures::v2(0, 0);
    b.col(0) = fixtures::v2(0, 0);
    CHECK(min_cross_distance(a, b) == 0.0);
  }
  SUBCASE("symmetry and permutation invariance") {
    const PointMatrix a = enumerator.per_letter_classes(3)[0].points;
    const PointMatrix b = enumerator.per_letter_classes(3)[3].points;
    const double d = min_cross_distance(a, b);
    CHECK(min_cross_distance(b, a) == d);
    CHECK(min_cross_distance(shuffled_columns(a, 1), shuffled_columns(b, 2)) == d);
    CHECK(min_cross_distance_serial(a, b) == d);
  }
}

TEST_CASE("budget guard trips loudly") {
  const auto sys = fixtures::triangular2d();  // q = 5
  ForcedResponseEnumerator enumerator(sys, 100);
  CHECK_NOTHROW(enumerator.depth_cloud(2));  // 25 tuples
  CHECK_THROWS_AS(enumerator.depth_cloud(3), BudgetExceeded);  // 125 > 100
  try {
    enumerator.depth_cloud(3);
  } catch (const BudgetExceeded& e) {
    CHECK(e.depth() == 3);
    CHECK(e.budget() == 100);
  }
}

TEST_CASE("letter image separation check") {
  SUBCASE("contractive planar system is certified") {
    const auto report = input_separation_check(fixtures::triangular2d());
    CHECK(report.verdict == SeparationReport::Verdict::DisjointCertified);
    CHECK(report.reach_bound == doctest::Approx(4.0 / 3.0));
    CHECK(report.a_norm == 0.25);
    // smallest letter gap 1 against spread 2 * 0.25 * 4/3 = 2/3
    CHECK(report.min_margin == doctest::Approx(1.0 - 2.0 / 3.0));
    CHECK(report.pairs.size() == 10);
  }
  SUBCASE("coinciding letter images are inconclusive") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2) * 0.25;
    Eigen::MatrixXd B(2, 2);
    B << 1, 0, 0, 0;  // kills the second input coordinate
    const auto sys = SystemSpec::create(A, B, {fixtures::v2(0, 0), fixtures::v2(0, 1)});
    const auto report = input_separation_check(sys);
    CHECK(report.verdict == SeparationReport::Verdict::Inconclusive);
    CHECK(report.pairs[0].gap == 0.0);
  }
  SUBCASE("single letter is vacuously certified") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2) * 0.5;
    Eigen::MatrixXd B = Eigen::MatrixXd::Identity(2, 2);
    const auto single = SystemSpec::create(A, B, {fixtures::v2(0, 0)});
    const auto report = input_separation_check(single);
    CHECK(report.verdict == SeparationReport::Verdict::DisjointCertified);
    CHECK(report.pairs.empty());
  }
}

TEST_CASE("per-letter separation distances dominate the one-step margin") {
  const auto sys = fixtures::triangular2d();
  const auto separation = input_separation_check(sys);
  REQUIRE(separation.verdict == SeparationReport::Verdict::DisjointCertified);
  ForcedResponseEnumerator enumerator(sys, 1'000'000);
  for (int k = 1; k <= 6; ++k) {
    const double d_k = min_cross_distance(enumerator.per_letter_classes(k));
    CHECK(d_k >= separation.min_margin - 1e-12);
  }
}

TEST_CASE("dedup keeps the first occurrence") {
  PointMatrix pts(2, 4);
  pts.col(0) = fixtures::v2(1, 2);
  pts.col(1) = fixtures::v2(3, 4);
  pts.col(2) = fixtures::v2(1, 2);
  pts.col(3) = fixtures::v2(5, 6);
  const PointMatrix out = dedup_columns(pts);
  REQUIRE(out.cols() == 3);
  CHECK(oracles::same_bits(out.col(0), fixtures::v2(1, 2)));
  CHECK(oracles::same_bits(out.col(1), fixtures::v2(3, 4)));
  CHECK(oracles::same_bits(out.col(2), fixtures::v2(5, 6)));
}

TEST_CASE("cloud debug dump") {
  const auto sys = fixtures::deadbeat2d();
  const std::string table = dump_cloud_table(sys, 2, 1000);
  // header + 8 surviving points
  CHECK(std::count(table.begin(), table.end(), '\n') == 9);
  CHECK(table.find("tuple\tx0\tx1") == 0);
  CHECK(table.find("0,0\t1.5\t0") != std::string::npos);
  CHECK_THROWS_AS(dump_cloud_table(sys, 20, 1000), BudgetExceeded);
}
