#include <mixfem/mesh.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace mixfem;

namespace {

bool contains(const Triangle& t, int v) {
  return std::find(t.vertex_ids.begin(), t.vertex_ids.end(), v) != t.vertex_ids.end();
}

}  // namespace

TEST(Mesh, CountsAtFirstLevels) {
  const int expected[3][3] = {{4, 5, 2}, {9, 16, 8}, {25, 56, 32}};
  for (int level = 1; level <= 3; ++level) {
    const Mesh m = build_unit_square_mesh(level);
    EXPECT_EQ(m.num_vertices(), expected[level - 1][0]);
    EXPECT_EQ(m.num_edges(), expected[level - 1][1]);
    EXPECT_EQ(m.num_triangles(), expected[level - 1][2]);
    EXPECT_EQ(m.level, level);
  }
}

TEST(Mesh, ClosedFormCountsAndEuler) {
  for (int level = 1; level <= 6; ++level) {
    const Mesh m = build_unit_square_mesh(level);
    const int n = 1 << (level - 1);
    EXPECT_EQ(m.num_vertices(), (n + 1) * (n + 1));
    EXPECT_EQ(m.num_triangles(), 2 * n * n);
    EXPECT_EQ(m.num_edges(), 3 * n * n + 2 * n);
    EXPECT_EQ(m.num_vertices() - m.num_edges() + m.num_triangles(), 1);
    const auto boundary = std::count_if(m.edges.begin(), m.edges.end(), [](const Edge& e) { return e.is_boundary(); });
    EXPECT_EQ(boundary, 4 * n);
  }
}

TEST(Mesh, AreasSumToOneAndArePositive) {
  for (auto diag : {Diagonal::south_west_north_east, Diagonal::south_east_north_west}) {
    for (int level = 1; level <= 5; ++level) {
      const Mesh m = build_unit_square_mesh(level, diag);
      double total = 0.0;
      for (int t = 0; t < m.num_triangles(); ++t) {
        const auto g = element_geometry(m, t);
        EXPECT_GT(g.det_b, 0.0) << "triangle " << t << " is not counter-clockwise";
        total += g.area();
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(Mesh, EdgeAdjacencyMatchesBruteForce) {
  const Mesh m = build_unit_square_mesh(4);
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto& edge = m.edges[e];
    std::set<int> brute;
    for (int t = 0; t < m.num_triangles(); ++t) {
      if (contains(m.triangles[t], edge.vertex_ids[0]) && contains(m.triangles[t], edge.vertex_ids[1])) brute.insert(t);
    }
    const std::set<int> listed(edge.adjacent_triangles.begin(), edge.adjacent_triangles.end());
    EXPECT_EQ(listed, brute) << "edge " << e;
    EXPECT_EQ(edge.is_boundary(), brute.size() == 1);
  }
}

TEST(Mesh, LocalEdgeIsOppositeLocalVertex) {
  const Mesh m = build_unit_square_mesh(3);
  for (const auto& t : m.triangles) {
    for (int i = 0; i < 3; ++i) {
      const auto& e = m.edges[t.edge_ids[i]];
      EXPECT_FALSE(e.vertex_ids[0] == t.vertex_ids[i] || e.vertex_ids[1] == t.vertex_ids[i]);
    }
  }
}

TEST(Mesh, RefinementIsNested) {
  Mesh coarse = build_unit_square_mesh(1);
  for (int level = 2; level <= 5; ++level) {
    const Mesh fine = build_unit_square_mesh(level);
    for (int v = 0; v < coarse.num_vertices(); ++v) {
      EXPECT_LT((fine.points[v] - coarse.points[v]).norm(), 1e-15);
    }
    coarse = fine;
  }
}

TEST(Mesh, LevelOneUsesTheSouthWestNorthEastDiagonal) {
  const Mesh m = build_unit_square_mesh(1);
  int diagonals = 0;
  for (const auto& e : m.edges) {
    const Point2 a = m.points[e.vertex_ids[0]], b = m.points[e.vertex_ids[1]];
    if (e.is_boundary()) continue;
    ++diagonals;
    EXPECT_NEAR(std::abs((b - a).x()), 1.0, 1e-15);
    EXPECT_NEAR((b - a).x() * (b - a).y(), 1.0, 1e-15) << "interior edge should run (0,0)-(1,1)";
  }
  EXPECT_EQ(diagonals, 1);
}

TEST(Mesh, TangentRunsFromLowerToHigherIndexAndNormalIsClockwise) {
  const Mesh m = build_unit_square_mesh(3);
  for (const auto& e : m.edges) {
    EXPECT_LT(e.vertex_ids[0], e.vertex_ids[1]);
    const Vec2 d = m.points[e.vertex_ids[1]] - m.points[e.vertex_ids[0]];
    EXPECT_LT((e.unit_tangent - d.normalized()).norm(), 1e-15);
    EXPECT_NEAR(e.unit_normal.x(), e.unit_tangent.y(), 1e-15);
    EXPECT_NEAR(e.unit_normal.y(), -e.unit_tangent.x(), 1e-15);
    EXPECT_NEAR(e.length(m.points), d.norm(), 1e-15);
  }
}

TEST(Mesh, HorizontalAndDiagonalEdgeFrames) {
  const Mesh m = build_unit_square_mesh(1);
  bool horizontal = false, diagonal = false;
  for (const auto& e : m.edges) {
    const Point2 a = m.points[e.vertex_ids[0]], b = m.points[e.vertex_ids[1]];
    if (a.isApprox(Point2(0, 0)) && b.isApprox(Point2(1, 0))) {
      horizontal = true;
      EXPECT_LT((e.unit_tangent - Vec2(1, 0)).norm(), 1e-15);
      EXPECT_LT((e.unit_normal - Vec2(0, -1)).norm(), 1e-15);
    }
    if (a.isApprox(Point2(0, 0)) && b.isApprox(Point2(1, 1))) {
      diagonal = true;
      EXPECT_LT((e.unit_tangent - Vec2(std::sqrt(0.5), std::sqrt(0.5))).norm(), 1e-15);
    }
  }
  EXPECT_TRUE(horizontal);
  EXPECT_TRUE(diagonal);
}

TEST(ElementGeometry, ReferenceTriangleIsIdentity) {
  const auto g = ElementGeometry::from_vertices({0, 0}, {1, 0}, {0, 1});
  EXPECT_LT((g.jacobian - Mat2::Identity()).norm(), 1e-15);
  EXPECT_LT((g.barycentric_gradients[1] - Vec2(1, 0)).norm(), 1e-15);
  EXPECT_LT((g.barycentric_gradients[2] - Vec2(0, 1)).norm(), 1e-15);
  EXPECT_LT((g.barycentric_gradients[0] - Vec2(-1, -1)).norm(), 1e-15);
}

TEST(ElementGeometry, ScaledRightTriangle) {
  const double h = 0.125;
  const auto g = ElementGeometry::from_vertices({0, 0}, {h, 0}, {0, h});
  EXPECT_LT((g.barycentric_gradients[1] - Vec2(1 / h, 0)).norm(), 1e-12);
  EXPECT_LT((g.barycentric_gradients[2] - Vec2(0, 1 / h)).norm(), 1e-12);
}

TEST(ElementGeometry, ArbitraryTriangleByHandInverse) {
  // B = [[2, 1], [1, 3]], det 5, B^{-1} = [[3, -1], [-1, 2]] / 5.
  const auto g = ElementGeometry::from_vertices({0, 0}, {2, 1}, {1, 3});
  EXPECT_NEAR(g.det_b, 5.0, 1e-14);
  EXPECT_LT((g.barycentric_gradients[1] - Vec2(0.6, -0.2)).norm(), 1e-15);
  EXPECT_LT((g.barycentric_gradients[2] - Vec2(-0.2, 0.4)).norm(), 1e-15);
  const Point2 x(1.1, 1.3);
  const auto b = g.barycentric(x);
  EXPECT_NEAR(b[0] + b[1] + b[2], 1.0, 1e-15);
  EXPECT_LT((g.to_physical(b) - x).norm(), 1e-14);
  EXPECT_LT((g.to_physical(g.to_reference(x)) - x).norm(), 1e-14);
}

TEST(ElementGeometry, RejectsDegenerateAndBadIndex) {
  EXPECT_THROW(ElementGeometry::from_vertices({0, 0}, {1, 1}, {2, 2}), std::invalid_argument);
  const Mesh m = build_unit_square_mesh(1);
  EXPECT_THROW(element_geometry(m, 2), std::out_of_range);
  EXPECT_THROW(element_geometry(m, -1), std::out_of_range);
  EXPECT_THROW(build_unit_square_mesh(0), std::invalid_argument);
}

TEST(Mesh, JsonExport) {
  const auto j = to_json(build_unit_square_mesh(2));
  EXPECT_EQ(j.at("points").size(), 9u);
  EXPECT_EQ(j.at("triangles").size(), 8u);
  EXPECT_EQ(j.at("edges").size(), 16u);
}
