#include <mixfem/verify.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace mixfem;

namespace {

// Cofactor expansion along the first row.
double det3(const double m[3][3]) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

const std::array<Point2, 3> kReference{Point2(0, 0), Point2(1, 0), Point2(0, 1)};

}  // namespace

TEST(Conformity, HoldsForAllDegrees) {
  for (int k = 3; k <= 5; ++k) {
    for (int level = 1; level <= 2; ++level) {
      const Mesh m = build_unit_square_mesh(level);
      const auto r = check_hdiv_conformity(StressSpace(m, k));
      EXPECT_TRUE(r.passed) << "k=" << k << " level " << level << ": " << r.detail;
      EXPECT_LE(r.value, 1e-12);
    }
  }
}

TEST(Conformity, NegativeControlsAreDetected) {
  const Mesh m = build_unit_square_mesh(2);
  const StressSpace s(m, 3);
  for (auto c : {Corruption::flipped_restriction_sign, Corruption::misaligned_bubble}) {
    const auto r = check_hdiv_conformity(corrupt(s, c));
    EXPECT_FALSE(r.passed) << to_string(c);
    EXPECT_GT(r.value, 0.1);
    EXPECT_GE(r.data.at("worst_edge").get<int>(), 0);
  }
}

TEST(DivInclusion, HoldsAndLowDegreeControlFails) {
  for (int k = 3; k <= 5; ++k) {
    const Mesh m = build_unit_square_mesh(2);
    const StressSpace s(m, k);
    EXPECT_TRUE(check_div_inclusion(s).passed) << "k=" << k;
    const auto low = check_div_inclusion(s, k - 2);
    EXPECT_FALSE(low.passed) << "k=" << k;
    EXPECT_GT(low.value, 1e-3);
  }
}

TEST(LocalRank, MatchesDimensionCount) {
  const std::pair<int, int> expected[] = {{9, 0}, {17, 1}, {27, 3}};
  for (int k = 3; k <= 5; ++k) {
    EXPECT_EQ(expected_local_rank(k), expected[k - 3]);
    const auto r = local_divergence_rank(k, kReference);
    EXPECT_EQ(r.rank, expected[k - 3].first) << "k=" << k;
    EXPECT_EQ(r.nullity, expected[k - 3].second) << "k=" << k;
  }
  std::mt19937_64 rng(4);
  for (int i = 0; i < 30; ++i) {
    const auto tri = random_triangle(rng);
    for (int k = 3; k <= 5; ++k) {
      const auto r = local_divergence_rank(k, tri);
      EXPECT_EQ(std::make_pair(r.rank, r.nullity), expected[k - 3]);
    }
  }
}

TEST(LocalRank, RejectsDegenerateTriangle) {
  EXPECT_THROW(local_divergence_rank(3, {Point2(0, 0), Point2(1, 1), Point2(2, 2)}), std::invalid_argument);
  EXPECT_THROW(local_divergence_rank(2, kReference), std::invalid_argument);
}

TEST(RigidMotions, BubbleDivergencesAreOrthogonal) {
  std::mt19937_64 rng(8);
  for (int k = 3; k <= 5; ++k) {
    EXPECT_LE(rigid_motion_orthogonality(k, kReference), 1e-12);
    EXPECT_LE(rigid_motion_orthogonality(k, random_triangle(rng)), 1e-12);
    EXPECT_GT(rigid_motion_orthogonality(k, kReference, true), 1e-3);
  }
}

TEST(InfSup, PositiveAndStableUnderRefinement) {
  double first = 0.0;
  for (int level = 1; level <= 3; ++level) {
    const auto r = discrete_infsup_estimate(build_unit_square_mesh(level), 3);
    EXPECT_GT(r.beta, 0.0);
    EXPECT_EQ(r.zero_modes, 0);
    if (level == 1) first = r.beta;
    EXPECT_GE(r.beta / first, 0.5);
  }
  EXPECT_GT(discrete_infsup_estimate(build_unit_square_mesh(1), 4).beta, 0.0);
  EXPECT_THROW(discrete_infsup_estimate(build_unit_square_mesh(3), 3, 100), std::invalid_argument);
}

TEST(Lemma3, Examples) {
  const auto id = lemma3_check({1, 0}, {0, 1});
  EXPECT_NEAR(id.determinant, 1.0, 1e-15);
  const auto r = lemma3_check({1, 2}, {3, 4});
  // Columns (x^2, y^2, xy) of v1 = (1,2), v2 = (3,4), v0 = (4,6).
  const double m[3][3] = {{1, 9, 16}, {4, 16, 36}, {2, 12, 24}};
  EXPECT_NEAR(det3(m), -8.0, 1e-12);
  EXPECT_NEAR(r.determinant, -8.0, 1e-12);
  EXPECT_NEAR(r.expected, -8.0, 1e-15);
  EXPECT_NEAR(lemma3_check({1, 2}, {2, 4}).determinant, 0.0, 1e-13);
}

TEST(Lemma3, RandomPairs) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const Vec2 a(g(rng), g(rng)), b(g(rng), g(rng));
    const auto r = lemma3_check(a, b);
    EXPECT_LE(std::abs(r.determinant - r.expected), 1e-10 * lemma3_scale(a, b));
  }
}

TEST(Report, CleanRunPassesAndCorruptedRunNamesTheCheck) {
  VerifyOptions opts;
  opts.random_triangles = 10;
  opts.lemma3_pairs = 100;
  const auto ok = run_verification(3, 1, opts);
  EXPECT_TRUE(ok.passed());
  const auto j = to_json(ok);
  EXPECT_TRUE(j.at("passed").get<bool>());
  EXPECT_GE(j.at("checks").size(), 10u);

  opts.corruption = Corruption::flipped_restriction_sign;
  const auto bad = run_verification(3, 1, opts);
  EXPECT_FALSE(bad.passed());
  ASSERT_EQ(bad.failures().size(), 1u);
  EXPECT_EQ(bad.failures()[0], "hdiv_conformity");
  EXPECT_THROW(run_verification(6, 1, opts), std::invalid_argument);
}
