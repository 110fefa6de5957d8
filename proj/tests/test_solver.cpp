#include <mixfem/analysis.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <utility>
#include <vector>

using namespace mixfem;

namespace {

// Dense Gaussian elimination with partial pivoting, row-major. Deliberately independent of Eigen.
std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    }
    if (a[p][c] == 0.0) throw std::runtime_error("dense oracle: singular");
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      if (f == 0.0) continue;
      for (std::size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

SaddleSystem study_system(int k, int level) {
  const ComplianceTensor a(0.5, 1.0);
  const Mesh m = build_unit_square_mesh(level);
  const StressSpace s(m, k);
  const DisplacementSpace v(m, k);
  const ExponentialSineSolution sol;
  return assemble(s, v, a, [&](const Point2& p) { return sol.load(p, a); });
}

}  // namespace

TEST(Solver, SmallestSystemResidual) {
  const auto sys = study_system(3, 1);
  ASSERT_EQ(sys.size(), 74);
  const auto sol = solve(sys);
  EXPECT_LE(sol.relative_residual, 1e-12);
  EXPECT_FALSE(sol.residual_history.empty());
}

TEST(Solver, AgreesWithDenseOracle) {
  const std::pair<int, int> cases[] = {{3, 1}, {4, 1}, {5, 1}, {3, 2}, {4, 2}, {5, 2}, {3, 3}};
  for (const auto& [k, level] : cases) {
    const auto sys = study_system(k, level);
    ASSERT_LE(sys.size(), 1000);
    const Eigen::MatrixXd kd(sys.kkt());
    const Eigen::VectorXd rhs = sys.rhs();
    std::vector<std::vector<double>> a(sys.size(), std::vector<double>(sys.size()));
    for (int i = 0; i < sys.size(); ++i) {
      for (int j = 0; j < sys.size(); ++j) a[i][j] = kd(i, j);
    }
    const auto x = dense_solve(a, std::vector<double>(rhs.data(), rhs.data() + rhs.size()));
    const Eigen::VectorXd xd = Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
    const auto sol = solve(sys);
    Eigen::VectorXd z(sys.size());
    z << sol.stress, sol.displacement;
    EXPECT_LE((z - xd).norm(), 1e-9 * xd.norm()) << "k=" << k << " level " << level;
  }
}

TEST(Solver, ZeroLoadGivesZeroSolution) {
  const Mesh m = build_unit_square_mesh(2);
  const StressSpace s(m, 3);
  const DisplacementSpace v(m, 3);
  const auto sys = assemble(s, v, ComplianceTensor(0.5, 1.0), [](const Point2&) { return Vec2(0, 0); });
  const auto sol = solve(sys);
  EXPECT_EQ(sol.stress.norm(), 0.0);
  EXPECT_EQ(sol.displacement.norm(), 0.0);
}

TEST(Solver, DeterministicForFixedInput) {
  const auto sys = study_system(4, 2);
  const auto a = solve(sys);
  const auto b = solve(sys);
  EXPECT_EQ(a.stress, b.stress);
  EXPECT_EQ(a.displacement, b.displacement);
}

TEST(Solver, SingularSystemReported) {
  auto sys = study_system(3, 1);
  // Duplicate a row of B: the constraint block loses rank.
  Eigen::MatrixXd b(sys.B);
  b.row(1) = b.row(0);
  sys.B = b.sparseView();
  EXPECT_THROW(solve(sys), SolverError);
}

TEST(Solver, InconsistentDimensionsRejected) {
  auto sys = study_system(3, 1);
  sys.F = Eigen::VectorXd::Ones(3);
  EXPECT_THROW(solve(sys), std::invalid_argument);
}
