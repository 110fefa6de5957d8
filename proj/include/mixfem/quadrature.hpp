#pragma once

/// @file quadrature.hpp
/// Gauss rules on edges and collapsed (Duffy) Gauss-Jacobi rules on triangles.
///
/// Weights are normalized to sum to one; multiply by the element measure at the use site.

#include "mesh.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mixfem {

struct QuadratureRule {
  /// Barycentric points for triangle rules; (1 - s, s, 0) for edge rules with s in [0,1].
  std::vector<Bary> points;
  std::vector<double> weights;
  int degree = 0;

  [[nodiscard]] std::size_t size() const { return weights.size(); }
};

inline constexpr int kMaxTriangleRuleDegree = 30;

/// Gauss-Jacobi nodes and weights for (1-x)^alpha (1+x)^beta on [-1,1] (Golub-Welsch).
inline std::pair<std::vector<double>, std::vector<double>> gauss_jacobi(int n, double alpha, double beta) {
  if (n < 1) throw std::invalid_argument("gauss_jacobi: need at least one point");
  const double ab = alpha + beta;
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double s = 2.0 * i + ab;
    jacobi(i, i) = (i == 0) ? (beta - alpha) / (ab + 2.0) : (beta * beta - alpha * alpha) / (s * (s + 2.0));
    if (i + 1 < n) {
      const double m = i + 1.0;
      const double t = 2.0 * m + ab;
      const double off = std::sqrt(4.0 * m * (m + alpha) * (m + beta) * (m + ab) / (t * t * (t + 1.0) * (t - 1.0)));
      jacobi(i, i + 1) = off;
      jacobi(i + 1, i) = off;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  const double mu0 = std::pow(2.0, ab + 1.0) * std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) /
                     std::tgamma(ab + 2.0);
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    x[i] = eig.eigenvalues()(i);
    const double v0 = eig.eigenvectors()(0, i);
    w[i] = mu0 * v0 * v0;
  }
  return {x, w};
}

/// n-point Gauss rule on an edge, exact to degree 2n - 1 >= d.
inline QuadratureRule edge_rule(int degree) {
  if (degree < 0) throw std::invalid_argument("edge_rule: negative degree");
  const int n = std::max(1, (degree + 2) / 2);
  const auto [x, w] = gauss_jacobi(n, 0.0, 0.0);
  QuadratureRule rule;
  rule.degree = 2 * n - 1;
  for (int i = 0; i < n; ++i) {
    const double s = 0.5 * (x[i] + 1.0);
    rule.points.push_back({1.0 - s, s, 0.0});
    rule.weights.push_back(0.5 * w[i]);
  }
  return rule;
}

/// Collapsed tensor rule: xhat = u (1 - v), yhat = v, with Gauss-Legendre in u and
/// Gauss-Jacobi(1,0) in v absorbing the Jacobian (1 - v). All weights are positive.
inline QuadratureRule triangle_rule(int degree) {
  if (degree < 1 || degree > kMaxTriangleRuleDegree) {
    throw std::invalid_argument("triangle_rule: unsupported degree " + std::to_string(degree));
  }
  const int n = (degree + 2) / 2;
  const auto [xu, wu] = gauss_jacobi(n, 0.0, 0.0);
  const auto [xv, wv] = gauss_jacobi(n, 1.0, 0.0);
  QuadratureRule rule;
  rule.degree = 2 * n - 1;
  // Both 1D weight sets sum to 2; dividing by 4 normalizes the rule to unit total weight.
  for (int j = 0; j < n; ++j) {
    const double v = 0.5 * (xv[j] + 1.0);
    for (int i = 0; i < n; ++i) {
      const double u = 0.5 * (xu[i] + 1.0);
      const double xhat = u * (1.0 - v);
      const double yhat = v;
      rule.points.push_back({1.0 - xhat - yhat, xhat, yhat});
      rule.weights.push_back(wu[i] * wv[j] / 4.0);
    }
  }
  return rule;
}

}  // namespace mixfem
