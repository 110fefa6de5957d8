#include <mixfem/analysis.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace mixfem;

namespace {

// Central-difference divergence of the exact stress, from stress values only.
Vec2 fd_divergence(const ManufacturedSolution& s, const ComplianceTensor& a, const Point2& p, double h) {
  const auto sx = (1.0 / (2 * h)) * (s.stress(p + Vec2(h, 0), a) - s.stress(p - Vec2(h, 0), a));
  const auto sy = (1.0 / (2 * h)) * (s.stress(p + Vec2(0, h), a) - s.stress(p - Vec2(0, h), a));
  return {sx.a11 + sy.a12, sx.a12 + sy.a22};
}

Mat2 fd_gradient(const ManufacturedSolution& s, const Point2& p, double h) {
  Mat2 g;
  g.col(0) = (s.displacement(p + Vec2(h, 0)) - s.displacement(p - Vec2(h, 0))) / (2 * h);
  g.col(1) = (s.displacement(p + Vec2(0, h)) - s.displacement(p - Vec2(0, h))) / (2 * h);
  return g;
}

}  // namespace

TEST(ExactFields, CentreValue) {
  const auto f = exact_fields(ExponentialSineSolution{}, ComplianceTensor(0.5, 1.0), {0.5, 0.5});
  EXPECT_NEAR(f.u.x(), 0.0625, 1e-15);
  EXPECT_NEAR(f.u.y(), 1.0, 1e-15);
}

TEST(ExactFields, VanishesOnTheBoundary) {
  const ExponentialSineSolution s;
  for (double t = 0.0; t <= 1.0; t += 0.125) {
    for (const Point2& p : {Point2(t, 0), Point2(t, 1), Point2(0, t), Point2(1, t)}) {
      EXPECT_LT(s.displacement(p).norm(), 1e-15);
    }
  }
}

TEST(ExactFields, DerivativesMatchFiniteDifferences) {
  const ComplianceTensor a(0.5, 1.0);
  const ExponentialSineSolution exp_sine;
  const PolynomialBubbleSolution bubble(3.0);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (const ManufacturedSolution* s : {static_cast<const ManufacturedSolution*>(&exp_sine),
                                         static_cast<const ManufacturedSolution*>(&bubble)}) {
    for (int i = 0; i < 20; ++i) {
      const Point2 p(u(rng), u(rng));
      const Mat2 g = s->gradient(p);
      EXPECT_LT((g - fd_gradient(*s, p, 1e-5)).norm(), 1e-8 * std::max(1.0, g.norm()));
      const Vec2 f = s->load(p, a);
      const Vec2 fd = fd_divergence(*s, a, p, 1e-5);
      EXPECT_LT((f - fd).norm(), 1e-6 * std::max(1.0, f.norm())) << "point " << p.transpose();
    }
  }
}

TEST(ExactFields, LoadScalesWithLameConstants) {
  const ExponentialSineSolution s;
  const Point2 p(0.3, 0.7);
  const Vec2 f1 = s.load(p, ComplianceTensor(0.5, 1.0));
  const Vec2 f2 = s.load(p, ComplianceTensor(1.0, 2.0));
  EXPECT_LT((f2 - 2.0 * f1).norm(), 1e-13 * f2.norm());
}

TEST(ConvergenceTable, OrdersAbsentForFirstRow) {
  ConvergenceTable t;
  t.k = 3;
  t.rows.push_back({1, 3, 1.0, 2.0, 4.0, 24, 50, 0, 0});
  t.rows.push_back({2, 3, 0.125, 0.125, 1.0, 96, 163, 0, 0});
  EXPECT_FALSE(t.orders(0).has_value());
  const auto o = t.orders(1);
  ASSERT_TRUE(o.has_value());
  EXPECT_DOUBLE_EQ((*o)[0], 3.0);
  EXPECT_DOUBLE_EQ((*o)[1], 4.0);
  EXPECT_DOUBLE_EQ((*o)[2], 2.0);
  EXPECT_FALSE(t.orders(2).has_value());
}

TEST(Study, DivergenceIdentityAndOrders) {
  const auto table = run_study(3, 4);
  ASSERT_EQ(table.rows.size(), 4u);
  for (const auto& r : table.rows) {
    EXPECT_LE(r.div_identity, 1e-9);
    EXPECT_LE(r.solver_residual, 1e-10);
    EXPECT_GE(r.err_u, 0.0);
  }
  const auto o = *table.orders(3);
  EXPECT_NEAR(o[0], 3.0, 0.15);
  EXPECT_NEAR(o[1], 4.0, 0.25);
  EXPECT_NEAR(o[2], 3.0, 0.15);
  EXPECT_EQ(table.rows.back().dim_v, 1536);
  EXPECT_EQ(table.rows.back().dim_sigma, 2227);
}

TEST(Study, PolynomialSolutionIsReproduced) {
  StudyOptions opts;
  const auto r = run_level(5, 1, PolynomialBubbleSolution(2.0), opts);
  EXPECT_LE(r.err_u, 1e-8);
  EXPECT_LE(r.err_sigma, 1e-8);
  EXPECT_LE(r.err_div, 1e-8);
}

TEST(Study, RejectsBadArguments) {
  EXPECT_THROW(run_study(6, 1), std::invalid_argument);
  EXPECT_THROW(run_study(3, 0), std::invalid_argument);
}

TEST(Study, OutputFormats) {
  const auto table = run_study(4, 2);
  std::ostringstream csv, text;
  write_csv(csv, table);
  write_text(text, table);
  const std::string c = csv.str();
  EXPECT_EQ(c.substr(0, c.find('\n')), "k,level,err_u,order_u,err_sigma,order_sigma,err_div,order_div,dim_v,dim_sigma");
  EXPECT_NE(c.find(",160,267\n"), std::string::npos);
  EXPECT_NE(text.str().find("P4 element"), std::string::npos);
  const auto j = to_json(table);
  EXPECT_EQ(j.at("rows").size(), 2u);
  EXPECT_FALSE(j["rows"][0].contains("order_u"));
  EXPECT_TRUE(j["rows"][1].contains("order_u"));
}

TEST(Study, OnLevelCallbackSeesEverySystem) {
  StudyOptions opts;
  int calls = 0;
  opts.on_level = [&](const Mesh& m, const SaddleSystem& sys, const ErrorReport& r) {
    ++calls;
    EXPECT_EQ(m.level, r.level);
    EXPECT_EQ(sys.dim_stress(), r.dim_sigma);
  };
  run_study(3, 3, opts);
  EXPECT_EQ(calls, 3);
}
