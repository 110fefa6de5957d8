#pragma once

/// @file lagrange.hpp
/// Nodes and nodal basis of the scalar Lagrange element of degree k on a triangle.

#include "mesh.hpp"

#include <Eigen/LU>

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mixfem {

enum class NodeKind { vertex, edge, interior };

struct LagrangeNode {
  NodeKind kind = NodeKind::vertex;
  /// Local vertex id, local edge id, or -1 for interior nodes.
  int entity = -1;
  /// j in 1..k-1 along an edge; 0 otherwise.
  int position = 0;
  /// Integer multi-index (i0, i1, i2) with i0 + i1 + i2 = k; barycentric = index / k.
  std::array<int, 3> index{};
  Bary bary{};
};

/// Local node ordering: the three vertices, then k-1 nodes on each edge E_0, E_1, E_2,
/// then the (k-1)(k-2)/2 interior nodes.
///
/// Edge E_i runs between x_{i-1} and x_{i+1}; its j-th node is (j/k) x_{i-1} + ((k-j)/k) x_{i+1}.
/// Interior node (l, m) sits at (l/k) x_0 + (m/k) x_1 + ((k-l-m)/k) x_2.
class LagrangeNodeSet {
 public:
  explicit LagrangeNodeSet(int k) : k_(k) {
    if (k < 3) throw std::invalid_argument("lagrange_nodes: degree must be >= 3, got " + std::to_string(k));
    for (int i = 0; i < 3; ++i) {
      std::array<int, 3> idx{};
      idx[i] = k;
      push(NodeKind::vertex, i, 0, idx);
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 1; j < k; ++j) {
        std::array<int, 3> idx{};
        idx[(i + 2) % 3] = j;
        idx[(i + 1) % 3] = k - j;
        push(NodeKind::edge, i, j, idx);
      }
    }
    for (int l = 1; l < k; ++l) {
      for (int m = 1; l + m <= k - 1; ++m) push(NodeKind::interior, -1, 0, {l, m, k - l - m});
    }
  }

  [[nodiscard]] int degree() const { return k_; }
  [[nodiscard]] int size() const { return static_cast<int>(nodes_.size()); }
  [[nodiscard]] const LagrangeNode& operator[](int i) const { return nodes_[i]; }
  [[nodiscard]] const std::vector<LagrangeNode>& nodes() const { return nodes_; }

  [[nodiscard]] static int vertex_node(int i) { return i; }
  [[nodiscard]] int edge_node(int edge, int j) const { return 3 + edge * (k_ - 1) + (j - 1); }
  [[nodiscard]] int interior_begin() const { return 3 + 3 * (k_ - 1); }
  [[nodiscard]] int interior_count() const { return (k_ - 1) * (k_ - 2) / 2; }

  [[nodiscard]] std::vector<Point2> positions(const ElementGeometry& geom) const {
    std::vector<Point2> out;
    out.reserve(nodes_.size());
    for (const auto& n : nodes_) out.push_back(geom.to_physical(n.bary));
    return out;
  }

 private:
  void push(NodeKind kind, int entity, int position, std::array<int, 3> idx) {
    LagrangeNode n;
    n.kind = kind;
    n.entity = entity;
    n.position = position;
    n.index = idx;
    for (int c = 0; c < 3; ++c) n.bary[c] = static_cast<double>(idx[c]) / k_;
    nodes_.push_back(n);
  }

  int k_;
  std::vector<LagrangeNode> nodes_;
};

inline LagrangeNodeSet lagrange_nodes(int k) { return LagrangeNodeSet(k); }

inline void check_barycentric(const Bary& b) {
  const double sum = b[0] + b[1] + b[2];
  if (!(std::abs(sum - 1.0) <= 1e-12) || b[0] < -1e-12 || b[1] < -1e-12 || b[2] < -1e-12) {
    throw std::invalid_argument("barycentric point outside the triangle");
  }
}

/// Powers lambda_c^p for p = 0..k.
class BarycentricPowers {
 public:
  BarycentricPowers(const Bary& b, int k) : k_(k), pow_(3 * (k + 1)) {
    for (int c = 0; c < 3; ++c) {
      pow_[c * (k + 1)] = 1.0;
      for (int p = 1; p <= k; ++p) pow_[c * (k + 1) + p] = pow_[c * (k + 1) + p - 1] * b[c];
    }
  }
  [[nodiscard]] double operator()(int c, int p) const { return p < 0 ? 0.0 : pow_[c * (k_ + 1) + p]; }

 private:
  int k_;
  std::vector<double> pow_;
};

/// Value of the barycentric monomial lambda^e and its partials with respect to each lambda_c.
inline double barycentric_monomial(const BarycentricPowers& pw, const std::array<int, 3>& e,
                                   std::array<double, 3>* dlambda) {
  const double v0 = pw(0, e[0]), v1 = pw(1, e[1]), v2 = pw(2, e[2]);
  if (dlambda != nullptr) {
    (*dlambda)[0] = e[0] == 0 ? 0.0 : e[0] * pw(0, e[0] - 1) * v1 * v2;
    (*dlambda)[1] = e[1] == 0 ? 0.0 : e[1] * v0 * pw(1, e[1] - 1) * v2;
    (*dlambda)[2] = e[2] == 0 ? 0.0 : e[2] * v0 * v1 * pw(2, e[2] - 1);
  }
  return v0 * v1 * v2;
}

/// Exponents (a, b, c) with a + b + c = degree, spanning P_degree on a triangle.
inline std::vector<std::array<int, 3>> barycentric_exponents(int degree) {
  std::vector<std::array<int, 3>> out;
  for (int a = degree; a >= 0; --a) {
    for (int b = degree - a; b >= 0; --b) out.push_back({a, b, degree - a - b});
  }
  return out;
}

/// Nodal basis of degree k expressed in the homogeneous barycentric monomials
/// lambda_0^a lambda_1^b lambda_2^c (a + b + c = k). The coefficients come from
/// inverting the nodal Vandermonde matrix once.
class ScalarLagrangeBasis {
 public:
  explicit ScalarLagrangeBasis(int k) : nodes_(k), exponents_(barycentric_exponents(k)) {
    const int n = nodes_.size();
    Eigen::MatrixXd vandermonde(n, n);
    for (int i = 0; i < n; ++i) {
      const BarycentricPowers pw(nodes_[i].bary, k);
      for (int j = 0; j < n; ++j) vandermonde(i, j) = barycentric_monomial(pw, exponents_[j], nullptr);
    }
    coefficients_ = vandermonde.fullPivLu().inverse();
  }

  [[nodiscard]] int degree() const { return nodes_.degree(); }
  [[nodiscard]] int size() const { return nodes_.size(); }
  [[nodiscard]] const LagrangeNodeSet& nodes() const { return nodes_; }

  /// Writes every basis value and, if requested, its partials with respect to
  /// (lambda_0, lambda_1, lambda_2). No validation of the point.
  void evaluate_unchecked(const Bary& b, std::span<double> values,
                          std::span<std::array<double, 3>> dlambda = {}) const {
    const int n = size();
    const BarycentricPowers pw(b, degree());
    std::fill(values.begin(), values.end(), 0.0);
    const bool grad = !dlambda.empty();
    if (grad) std::fill(dlambda.begin(), dlambda.end(), std::array<double, 3>{0, 0, 0});
    std::array<double, 3> dm{};
    for (int j = 0; j < n; ++j) {
      const double m = barycentric_monomial(pw, exponents_[j], grad ? &dm : nullptr);
      for (int a = 0; a < n; ++a) {
        const double c = coefficients_(j, a);
        if (c == 0.0) continue;
        values[a] += c * m;
        if (grad) {
          dlambda[a][0] += c * dm[0];
          dlambda[a][1] += c * dm[1];
          dlambda[a][2] += c * dm[2];
        }
      }
    }
  }

  struct Evaluation {
    double value = 0.0;
    Vec2 gradient = Vec2::Zero();
  };

  /// Value and physical gradient of basis function `node` at barycentric point `b`.
  [[nodiscard]] Evaluation evaluate(int node, const Bary& b, const ElementGeometry& geom) const {
    if (node < 0 || node >= size()) throw std::out_of_range("eval_scalar_basis: node index");
    check_barycentric(b);
    std::vector<double> values(size());
    std::vector<std::array<double, 3>> dl(size());
    evaluate_unchecked(b, values, dl);
    return {values[node], geom.gradient(dl[node])};
  }

 private:
  LagrangeNodeSet nodes_;
  std::vector<std::array<int, 3>> exponents_;
  Eigen::MatrixXd coefficients_;
};

}  // namespace mixfem
