#pragma once

/// @file mesh.hpp
/// Uniformly refined triangulations of the unit square and per-element affine geometry.
///
/// Level 1 is the unit square cut by the diagonal from (0,0) to (1,1). Every further
/// level applies red refinement (each triangle split into four congruent children
/// through its edge midpoints). Vertices of level l are a prefix of the vertex list
/// of level l+1.

#include <Eigen/Dense>

#include <json.hpp>

#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mixfem {

using Point2 = Eigen::Vector2d;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Barycentric coordinates (lambda_0, lambda_1, lambda_2).
using Bary = std::array<double, 3>;

struct Triangle {
  std::array<int, 3> vertex_ids{};
  /// Local edge i is opposite local vertex i.
  std::array<int, 3> edge_ids{};
};

struct Edge {
  /// Lower global vertex index first; the tangent points from vertex_ids[0] to vertex_ids[1].
  std::array<int, 2> vertex_ids{};
  std::vector<int> adjacent_triangles;
  Vec2 unit_tangent = Vec2::Zero();
  /// Tangent rotated clockwise: n = (t_y, -t_x).
  Vec2 unit_normal = Vec2::Zero();

  [[nodiscard]] bool is_boundary() const { return adjacent_triangles.size() == 1; }
  [[nodiscard]] double length(const std::vector<Point2>& points) const {
    return (points[vertex_ids[1]] - points[vertex_ids[0]]).norm();
  }
};

struct Mesh {
  std::vector<Point2> points;
  std::vector<Triangle> triangles;
  std::vector<Edge> edges;
  int level = 0;

  [[nodiscard]] int num_vertices() const { return static_cast<int>(points.size()); }
  [[nodiscard]] int num_edges() const { return static_cast<int>(edges.size()); }
  [[nodiscard]] int num_triangles() const { return static_cast<int>(triangles.size()); }
};

/// Affine map x = B xhat + x0 from the reference triangle (0,0),(1,0),(0,1).
struct ElementGeometry {
  std::array<Point2, 3> vertices;
  Mat2 jacobian = Mat2::Identity();
  /// det(B) = 2 * signed area.
  double det_b = 1.0;
  /// Gradients of lambda_0, lambda_1, lambda_2. Rows of B^{-1} are grad lambda_1 and grad lambda_2.
  std::array<Vec2, 3> barycentric_gradients;

  static ElementGeometry from_vertices(const Point2& x0, const Point2& x1, const Point2& x2) {
    ElementGeometry g;
    g.vertices = {x0, x1, x2};
    g.jacobian.col(0) = x1 - x0;
    g.jacobian.col(1) = x2 - x0;
    g.det_b = g.jacobian.determinant();
    const double scale = std::max((x1 - x0).squaredNorm(), (x2 - x0).squaredNorm());
    if (!(std::abs(g.det_b) > 1e-14 * scale) || !std::isfinite(g.det_b)) {
      throw std::invalid_argument("element_geometry: degenerate triangle");
    }
    const Mat2 inv = g.jacobian.inverse();
    g.barycentric_gradients[1] = inv.row(0).transpose();
    g.barycentric_gradients[2] = inv.row(1).transpose();
    g.barycentric_gradients[0] = -g.barycentric_gradients[1] - g.barycentric_gradients[2];
    return g;
  }

  [[nodiscard]] double area() const { return 0.5 * std::abs(det_b); }

  [[nodiscard]] Point2 to_physical(const Vec2& ref) const { return jacobian * ref + vertices[0]; }

  [[nodiscard]] Point2 to_physical(const Bary& b) const {
    return b[0] * vertices[0] + b[1] * vertices[1] + b[2] * vertices[2];
  }

  [[nodiscard]] Vec2 to_reference(const Point2& x) const {
    const Vec2 d = x - vertices[0];
    return {barycentric_gradients[1].dot(d), barycentric_gradients[2].dot(d)};
  }

  [[nodiscard]] Bary barycentric(const Point2& x) const {
    const Vec2 r = to_reference(x);
    return {1.0 - r.x() - r.y(), r.x(), r.y()};
  }

  /// Physical gradient from partial derivatives with respect to (lambda_0, lambda_1, lambda_2).
  [[nodiscard]] Vec2 gradient(const std::array<double, 3>& dlambda) const {
    return dlambda[0] * barycentric_gradients[0] + dlambda[1] * barycentric_gradients[1] +
           dlambda[2] * barycentric_gradients[2];
  }
};

inline ElementGeometry element_geometry(const Mesh& mesh, int t) {
  if (t < 0 || t >= mesh.num_triangles()) {
    throw std::out_of_range("element_geometry: triangle index " + std::to_string(t));
  }
  const auto& v = mesh.triangles[t].vertex_ids;
  return ElementGeometry::from_vertices(mesh.points[v[0]], mesh.points[v[1]], mesh.points[v[2]]);
}

namespace detail {

inline std::pair<int, int> edge_key(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

/// Rebuilds edges (with adjacency and frames) from the triangle list.
inline void build_edges(Mesh& mesh) {
  mesh.edges.clear();
  std::map<std::pair<int, int>, int> index;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      const int a = tri.vertex_ids[(i + 1) % 3];
      const int b = tri.vertex_ids[(i + 2) % 3];
      const auto key = edge_key(a, b);
      auto [it, inserted] = index.try_emplace(key, mesh.num_edges());
      if (inserted) {
        Edge e;
        e.vertex_ids = {key.first, key.second};
        mesh.edges.push_back(std::move(e));
      }
      mesh.edges[it->second].adjacent_triangles.push_back(t);
      tri.edge_ids[i] = it->second;
    }
  }
  for (auto& e : mesh.edges) {
    e.unit_tangent = (mesh.points[e.vertex_ids[1]] - mesh.points[e.vertex_ids[0]]).normalized();
    e.unit_normal = Vec2(e.unit_tangent.y(), -e.unit_tangent.x());
  }
}

}  // namespace detail

/// Red refinement of every triangle; parent vertices keep their indices.
inline Mesh refine_uniform(const Mesh& coarse) {
  Mesh fine;
  fine.level = coarse.level + 1;
  fine.points = coarse.points;
  std::map<std::pair<int, int>, int> midpoints;
  auto midpoint = [&](int a, int b) {
    auto [it, inserted] = midpoints.try_emplace(detail::edge_key(a, b), fine.num_vertices());
    if (inserted) fine.points.push_back(0.5 * (coarse.points[a] + coarse.points[b]));
    return it->second;
  };
  fine.triangles.reserve(4 * coarse.triangles.size());
  for (const auto& tri : coarse.triangles) {
    const auto [a, b, c] = tri.vertex_ids;
    const int ab = midpoint(a, b);
    const int bc = midpoint(b, c);
    const int ca = midpoint(c, a);
    fine.triangles.push_back({{a, ab, ca}, {}});
    fine.triangles.push_back({{ab, b, bc}, {}});
    fine.triangles.push_back({{ca, bc, c}, {}});
    fine.triangles.push_back({{ab, bc, ca}, {}});
  }
  detail::build_edges(fine);
  return fine;
}

/// Direction of the level-1 cut of the unit square.
enum class Diagonal {
  /// (0,0)-(1,1)
  south_west_north_east,
  /// (1,0)-(0,1)
  south_east_north_west,
};

/// Level 1: two right triangles separated by one diagonal of the square.
/// Level l: |K| = 2 * 4^(l-1), |V| = (2^(l-1) + 1)^2.
inline Mesh build_unit_square_mesh(int level, Diagonal diagonal = Diagonal::south_west_north_east) {
  if (level < 1) throw std::invalid_argument("build_unit_square_mesh: level must be >= 1");
  Mesh mesh;
  mesh.level = 1;
  mesh.points = {Point2(0, 0), Point2(1, 0), Point2(1, 1), Point2(0, 1)};
  if (diagonal == Diagonal::south_west_north_east) {
    mesh.triangles = {{{0, 1, 2}, {}}, {{0, 2, 3}, {}}};
  } else {
    mesh.triangles = {{{0, 1, 3}, {}}, {{1, 2, 3}, {}}};
  }
  detail::build_edges(mesh);
  for (int l = 1; l < level; ++l) mesh = refine_uniform(mesh);
  return mesh;
}

inline nlohmann::json to_json(const Mesh& mesh) {
  nlohmann::json j;
  j["level"] = mesh.level;
  auto& pts = j["points"] = nlohmann::json::array();
  for (const auto& p : mesh.points) pts.push_back({p.x(), p.y()});
  auto& tris = j["triangles"] = nlohmann::json::array();
  for (const auto& t : mesh.triangles) {
    tris.push_back({{"vertices", t.vertex_ids}, {"edges", t.edge_ids}});
  }
  auto& edges = j["edges"] = nlohmann::json::array();
  for (const auto& e : mesh.edges) {
    edges.push_back({{"vertices", e.vertex_ids},
                     {"triangles", e.adjacent_triangles},
                     {"tangent", {e.unit_tangent.x(), e.unit_tangent.y()}},
                     {"normal", {e.unit_normal.x(), e.unit_normal.y()}}});
  }
  return j;
}

}  // namespace mixfem
