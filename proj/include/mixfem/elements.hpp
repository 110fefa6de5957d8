#pragma once

/// @file elements.hpp
/// Symmetric-matrix-valued stress shape functions and the discontinuous displacement basis.
///
/// Every stress shape function is phi * D with phi a scalar Lagrange basis function of
/// degree k and D a constant symmetric matrix, so its row-wise divergence is D * grad(phi).

#include "lagrange.hpp"
#include "quadrature.hpp"

#include <Eigen/Cholesky>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace mixfem {

struct SymMatrix2 {
  double a11 = 0.0;
  double a12 = 0.0;
  double a22 = 0.0;

  static SymMatrix2 outer(const Vec2& v) { return {v.x() * v.x(), v.x() * v.y(), v.y() * v.y()}; }
  /// (u v^T + v u^T) / 2
  static SymMatrix2 sym_outer(const Vec2& u, const Vec2& v) {
    return {u.x() * v.x(), 0.5 * (u.x() * v.y() + u.y() * v.x()), u.y() * v.y()};
  }
  static SymMatrix2 identity() { return {1.0, 0.0, 1.0}; }

  [[nodiscard]] double trace() const { return a11 + a22; }
  [[nodiscard]] Vec2 apply(const Vec2& v) const { return {a11 * v.x() + a12 * v.y(), a12 * v.x() + a22 * v.y()}; }
  [[nodiscard]] Mat2 dense() const {
    Mat2 m;
    m << a11, a12, a12, a22;
    return m;
  }

  SymMatrix2& operator+=(const SymMatrix2& o) {
    a11 += o.a11;
    a12 += o.a12;
    a22 += o.a22;
    return *this;
  }
  friend SymMatrix2 operator+(SymMatrix2 a, const SymMatrix2& b) { return a += b; }
  friend SymMatrix2 operator-(const SymMatrix2& a, const SymMatrix2& b) {
    return {a.a11 - b.a11, a.a12 - b.a12, a.a22 - b.a22};
  }
  friend SymMatrix2 operator*(double s, const SymMatrix2& a) { return {s * a.a11, s * a.a12, s * a.a22}; }
  friend SymMatrix2 operator-(const SymMatrix2& a) { return {-a.a11, -a.a12, -a.a22}; }
};

/// A:B summed over all four entries.
inline double frobenius(const SymMatrix2& a, const SymMatrix2& b) {
  return a.a11 * b.a11 + 2.0 * a.a12 * b.a12 + a.a22 * b.a22;
}

/// Canonical basis T_1, T_2, T_3 of the symmetric matrices.
inline constexpr std::array<SymMatrix2, 3> kCanonicalDirections{
    SymMatrix2{1.0, 0.0, 0.0}, SymMatrix2{0.0, 1.0, 0.0}, SymMatrix2{0.0, 0.0, 1.0}};

/// Orthonormal triple {T_E, T_E_perp_1, T_E_perp_2} under the Frobenius product, built from
/// the unit tangent t and unit normal n of an edge.
struct EdgeMatrixFrame {
  SymMatrix2 tangential;  // t t^T
  SymMatrix2 perp1;       // n n^T
  SymMatrix2 perp2;       // (t n^T + n t^T) / sqrt(2)
};

inline EdgeMatrixFrame edge_matrix_frame(const Vec2& unit_tangent, const Vec2& unit_normal) {
  return {SymMatrix2::outer(unit_tangent), SymMatrix2::outer(unit_normal),
          std::sqrt(2.0) * SymMatrix2::sym_outer(unit_tangent, unit_normal)};
}

inline EdgeMatrixFrame edge_matrix_frame(const Edge& edge) {
  return edge_matrix_frame(edge.unit_tangent, edge.unit_normal);
}

enum class StressClass { vertex, volume, edge_flux, edge_bubble };

inline const char* to_string(StressClass c) {
  switch (c) {
    case StressClass::vertex: return "vertex";
    case StressClass::volume: return "volume";
    case StressClass::edge_flux: return "edge-flux";
    case StressClass::edge_bubble: return "edge-bubble";
  }
  return "?";
}

/// One global stress basis function phi_x * direction, where phi_x is the continuous
/// Lagrange basis function of global scalar node `node` restricted to `support`.
struct StressBasisFunction {
  StressClass cls = StressClass::vertex;
  int node = -1;
  SymMatrix2 direction;
  std::vector<int> support;
};

struct StressValue {
  SymMatrix2 value;
  Vec2 divergence = Vec2::Zero();
};

inline StressValue stress_shape(const SymMatrix2& direction, double phi, const Vec2& grad_phi) {
  return {phi * direction, direction.apply(grad_phi)};
}

/// Monomial exponents (a, b) with a + b <= degree, graded order.
inline std::vector<std::array<int, 2>> monomial_exponents(int degree) {
  std::vector<std::array<int, 2>> out;
  for (int d = 0; d <= degree; ++d) {
    for (int b = 0; b <= d; ++b) out.push_back({d - b, b});
  }
  return out;
}

inline int dim_polynomials(int degree) { return degree < 0 ? 0 : (degree + 1) * (degree + 2) / 2; }

/// L2(Khat)-orthonormal basis of P_degree on the reference triangle, from monomials centred
/// at the centroid. Orthonormalization is done twice (Cholesky of the Gram matrix) so the
/// result is orthonormal to rounding level. On a physical element K the functions are
/// psi(xhat) / sqrt(2 |K|).
class OrthonormalPolynomials {
 public:
  explicit OrthonormalPolynomials(int degree) : degree_(degree), exponents_(monomial_exponents(degree)) {
    if (degree < 0) throw std::invalid_argument("OrthonormalPolynomials: negative degree");
    const int n = size();
    const QuadratureRule rule = triangle_rule(std::max(1, 2 * degree));
    coefficients_ = Eigen::MatrixXd::Identity(n, n);
    for (int pass = 0; pass < 2; ++pass) {
      Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Eigen::VectorXd v = evaluate(rule.points[q]);
        gram.noalias() += (0.5 * rule.weights[q]) * v * v.transpose();
      }
      const Eigen::LLT<Eigen::MatrixXd> llt(gram);
      if (llt.info() != Eigen::Success) throw std::runtime_error("OrthonormalPolynomials: Gram matrix not SPD");
      // New basis = L^{-1} * old basis, so coefficient rows transform by L^{-1}.
      const Eigen::MatrixXd linv = llt.matrixL().solve(Eigen::MatrixXd::Identity(n, n));
      coefficients_ = linv * coefficients_;
    }
  }

  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] int size() const { return static_cast<int>(exponents_.size()); }

  /// Values of all basis functions at reference point xhat.
  [[nodiscard]] Eigen::VectorXd evaluate(const Vec2& xhat) const {
    Eigen::VectorXd m(size());
    const double x = xhat.x() - 1.0 / 3.0;
    const double y = xhat.y() - 1.0 / 3.0;
    for (int i = 0; i < size(); ++i) m(i) = std::pow(x, exponents_[i][0]) * std::pow(y, exponents_[i][1]);
    return coefficients_ * m;
  }

  [[nodiscard]] Eigen::VectorXd evaluate(const Bary& b) const { return evaluate(Vec2(b[1], b[2])); }

  /// Values of the L2(K)-orthonormal basis at a physical point of element K.
  [[nodiscard]] Eigen::VectorXd evaluate(const ElementGeometry& geom, const Point2& x) const {
    return evaluate(geom.to_reference(x)) / std::sqrt(2.0 * geom.area());
  }

 private:
  int degree_;
  std::vector<std::array<int, 2>> exponents_;
  Eigen::MatrixXd coefficients_;
};

/// Descriptor of one displacement basis function psi_mode * e_component on one element.
struct DisplacementBasisFunction {
  int element = -1;
  int component = 0;
  int mode = 0;
};

/// Discontinuous P_{k-1} vector basis: per element, component c and scalar mode m.
class DisplacementBasis {
 public:
  explicit DisplacementBasis(int k) : k_(k), scalar_(k - 1) {
    if (k < 1) throw std::invalid_argument("DisplacementBasis: degree must be >= 1");
  }

  [[nodiscard]] int degree() const { return k_; }
  [[nodiscard]] int scalar_size() const { return scalar_.size(); }
  /// k (k + 1) functions per element.
  [[nodiscard]] int per_element() const { return 2 * scalar_.size(); }
  [[nodiscard]] const OrthonormalPolynomials& scalar() const { return scalar_; }

  /// Value of basis function `f` at physical point x, given the element f lives on is `element`
  /// with geometry `geom`; zero on every other element.
  [[nodiscard]] Vec2 evaluate(const DisplacementBasisFunction& f, int element, const ElementGeometry& geom,
                              const Point2& x) const {
    Vec2 out = Vec2::Zero();
    if (element != f.element) return out;
    out[f.component] = scalar_.evaluate(geom, x)(f.mode);
    return out;
  }

 private:
  int k_;
  OrthonormalPolynomials scalar_;
};

}  // namespace mixfem
