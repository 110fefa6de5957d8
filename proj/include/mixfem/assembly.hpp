#pragma once

/// @file assembly.hpp
/// Assembly of the discrete Hellinger-Reissner system
///
///   [ M  B^T ] [sigma]   [0]
///   [ B  0   ] [  u  ] = [F]
///
/// with M_ij = (A phi_j, phi_i), B_ij = (div phi_j, psi_i), F_i = (f, psi_i).
///
/// The pure displacement problem u = 0 on the boundary is natural in this formulation:
/// no row or column of the system is constrained.

#include "spaces.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <functional>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace mixfem {

/// Isotropic compliance A tau = (tau - lambda / (2 mu + 2 lambda) tr(tau) I) / (2 mu).
class ComplianceTensor {
 public:
  ComplianceTensor(double mu, double lambda) : mu_(mu), lambda_(lambda) {
    if (!(mu > 0.0) || !(lambda > 0.0)) {
      throw std::invalid_argument("compliance tensor: Lame constants must be positive");
    }
  }

  [[nodiscard]] double mu() const { return mu_; }
  [[nodiscard]] double lambda() const { return lambda_; }

  [[nodiscard]] SymMatrix2 apply(const SymMatrix2& tau) const {
    const double s = 1.0 / (2.0 * mu_);
    const double t = lambda_ / (2.0 * mu_ + 2.0 * lambda_) * tau.trace();
    return {s * (tau.a11 - t), s * tau.a12, s * (tau.a22 - t)};
  }

  /// Inverse map: sigma = 2 mu eps + lambda tr(eps) I.
  [[nodiscard]] SymMatrix2 stiffness(const SymMatrix2& eps) const {
    const double t = lambda_ * eps.trace();
    return {2.0 * mu_ * eps.a11 + t, 2.0 * mu_ * eps.a12, 2.0 * mu_ * eps.a22 + t};
  }

 private:
  double mu_;
  double lambda_;
};

inline SymMatrix2 compliance_apply(const ComplianceTensor& a, const SymMatrix2& tau) { return a.apply(tau); }

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Triplets accumulated during assembly; duplicates are summed by compress().
struct TripletMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<Triplet> entries;

  [[nodiscard]] SparseMatrix compress() const {
    SparseMatrix m(rows, cols);
    m.setFromTriplets(entries.begin(), entries.end());
    m.makeCompressed();
    return m;
  }
  [[nodiscard]] Eigen::SparseMatrix<double, Eigen::RowMajor> compress_rows() const {
    Eigen::SparseMatrix<double, Eigen::RowMajor> m(rows, cols);
    m.setFromTriplets(entries.begin(), entries.end());
    m.makeCompressed();
    return m;
  }
};

struct SaddleSystem {
  SparseMatrix M;  // dim Sigma x dim Sigma
  SparseMatrix B;  // dim V x dim Sigma
  Eigen::VectorXd F;

  [[nodiscard]] int dim_stress() const { return static_cast<int>(M.rows()); }
  [[nodiscard]] int dim_displacement() const { return static_cast<int>(B.rows()); }
  [[nodiscard]] int size() const { return dim_stress() + dim_displacement(); }

  /// Full symmetric indefinite matrix [[M, B^T], [B, 0]].
  [[nodiscard]] SparseMatrix kkt() const {
    const int ns = dim_stress();
    std::vector<Triplet> t;
    t.reserve(M.nonZeros() + 2 * B.nonZeros());
    for (int c = 0; c < M.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(M, c); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
    }
    for (int c = 0; c < B.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(B, c); it; ++it) {
        t.emplace_back(ns + it.row(), it.col(), it.value());
        t.emplace_back(it.col(), ns + it.row(), it.value());
      }
    }
    SparseMatrix k(size(), size());
    k.setFromTriplets(t.begin(), t.end());
    k.makeCompressed();
    return k;
  }

  [[nodiscard]] Eigen::VectorXd rhs() const {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(size());
    r.tail(dim_displacement()) = F;
    return r;
  }
};

/// Scalar Lagrange values and barycentric partials at every point of a rule, shared by all
/// elements (they are affine images of the reference triangle).
struct ReferenceTabulation {
  QuadratureRule rule;
  int nodes = 0;
  std::vector<double> values;                 // [q * nodes + a]
  std::vector<std::array<double, 3>> dlambda;  // [q * nodes + a]
  std::vector<Eigen::VectorXd> displacement;  // [q] orthonormal P_{k-1} on the reference triangle, if requested

  ReferenceTabulation(const ScalarLagrangeBasis& basis, const OrthonormalPolynomials* disp, int degree)
      : rule(triangle_rule(degree)), nodes(basis.size()) {
    values.resize(rule.size() * nodes);
    dlambda.resize(rule.size() * nodes);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      basis.evaluate_unchecked(rule.points[q], std::span(values).subspan(q * nodes, nodes),
                               std::span(dlambda).subspan(q * nodes, nodes));
      if (disp != nullptr) displacement.push_back(disp->evaluate(rule.points[q]));
    }
  }

  [[nodiscard]] double value(std::size_t q, int a) const { return values[q * nodes + a]; }
  [[nodiscard]] const std::array<double, 3>& partials(std::size_t q, int a) const { return dlambda[q * nodes + a]; }
};

using VectorField = std::function<Vec2(const Point2&)>;

struct AssemblyOptions {
  /// Element loop threads; each thread keeps its own triplet buffers.
  int threads = 1;
};

namespace detail {

/// Runs body(t, triplets...) over element ranges on `threads` threads and returns the
/// per-thread buffers in thread order.
template <class Body>
std::vector<std::vector<std::vector<Triplet>>> parallel_elements(int num_elements, int threads, int buffers,
                                                                 Body body) {
  threads = std::max(1, std::min(threads, num_elements));
  std::vector<std::vector<std::vector<Triplet>>> out(threads, std::vector<std::vector<Triplet>>(buffers));
  auto work = [&](int id) {
    const int begin = static_cast<int>(static_cast<long long>(num_elements) * id / threads);
    const int end = static_cast<int>(static_cast<long long>(num_elements) * (id + 1) / threads);
    for (int t = begin; t < end; ++t) body(t, out[id]);
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int id = 0; id < threads; ++id) pool.emplace_back(work, id);
    for (auto& th : pool) th.join();
  }
  return out;
}

inline TripletMatrix merge(const std::vector<std::vector<std::vector<Triplet>>>& parts, int buffer, int rows,
                           int cols) {
  TripletMatrix m{rows, cols, {}};
  std::size_t n = 0;
  for (const auto& p : parts) n += p[buffer].size();
  m.entries.reserve(n);
  for (const auto& p : parts) m.entries.insert(m.entries.end(), p[buffer].begin(), p[buffer].end());
  return m;
}

inline void check_same_mesh(const StressSpace& s, const DisplacementSpace& v) {
  if (&s.mesh() != &v.mesh() || s.degree() != v.degree()) {
    throw std::invalid_argument("assemble: stress and displacement spaces differ in mesh or degree");
  }
}

}  // namespace detail

/// Load vector F_i = (f, psi_i), integrated with a rule of degree 2k + 4.
inline Eigen::VectorXd assemble_load(const DisplacementSpace& disp, const VectorField& f) {
  const Mesh& mesh = disp.mesh();
  const int k = disp.degree();
  const QuadratureRule rule = triangle_rule(2 * k + 4);
  const auto& scalar = disp.basis().scalar();
  const int np = scalar.size();
  std::vector<Eigen::VectorXd> psi;
  for (const auto& p : rule.points) psi.push_back(scalar.evaluate(p));
  Eigen::VectorXd out = Eigen::VectorXd::Zero(disp.dim());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto geom = element_geometry(mesh, t);
    const double scale = geom.area() / std::sqrt(2.0 * geom.area());
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 fq = f(geom.to_physical(rule.points[q]));
      const double w = rule.weights[q] * scale;
      for (int m = 0; m < np; ++m) {
        out(disp.index(t, 0, m)) += w * fq.x() * psi[q](m);
        out(disp.index(t, 1, m)) += w * fq.y() * psi[q](m);
      }
    }
  }
  return out;
}

/// Assembles M (compliance-weighted stress mass) and B (divergence coupling).
inline SaddleSystem assemble(const StressSpace& sigma, const DisplacementSpace& disp, const ComplianceTensor& a,
                             const VectorField& f, const AssemblyOptions& opts = {}) {
  detail::check_same_mesh(sigma, disp);
  const Mesh& mesh = sigma.mesh();
  const int k = sigma.degree();
  const ReferenceTabulation tab(sigma.scalar_basis(), &disp.basis().scalar(), 2 * k);
  const int np = disp.basis().scalar_size();

  auto body = [&](int t, std::vector<std::vector<Triplet>>& out) {
    const auto geom = element_geometry(mesh, t);
    const auto& dofs = sigma.local_dofs(t);
    const int n = static_cast<int>(dofs.size());
    Eigen::MatrixXd mloc = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd bloc = Eigen::MatrixXd::Zero(2 * np, n);
    std::vector<SymMatrix2> val(n), aval(n);
    std::vector<Vec2> div(n);
    const double psi_scale = 1.0 / std::sqrt(2.0 * geom.area());
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      const double w = tab.rule.weights[q] * geom.area();
      for (int i = 0; i < n; ++i) {
        const auto s = stress_shape(dofs[i].direction, tab.value(q, dofs[i].local_node),
                                    geom.gradient(tab.partials(q, dofs[i].local_node)));
        val[i] = s.value;
        div[i] = s.divergence;
        aval[i] = a.apply(s.value);
      }
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) mloc(i, j) += w * frobenius(aval[j], val[i]);
      }
      const Eigen::VectorXd& psi = tab.displacement[q];
      for (int j = 0; j < n; ++j) {
        for (int m = 0; m < np; ++m) {
          const double p = w * psi_scale * psi(m);
          bloc(m, j) += p * div[j].x();
          bloc(np + m, j) += p * div[j].y();
        }
      }
    }
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) out[0].emplace_back(dofs[i].global, dofs[j].global, mloc(i, j));
      for (int r = 0; r < 2 * np; ++r) {
        out[1].emplace_back(disp.index(t, r / np, r % np), dofs[j].global, bloc(r, j));
      }
    }
  };

  const auto parts = detail::parallel_elements(mesh.num_triangles(), opts.threads, 2, body);
  SaddleSystem sys;
  sys.M = detail::merge(parts, 0, sigma.dim(), sigma.dim()).compress();
  sys.B = detail::merge(parts, 1, disp.dim(), sigma.dim()).compress();
  sys.F = f ? assemble_load(disp, f) : Eigen::VectorXd::Zero(disp.dim());
  return sys;
}

/// Gram matrix of the H(div) inner product (tau, sigma) + (div tau, div sigma) on the stress space.
inline SparseMatrix assemble_hdiv_gram(const StressSpace& sigma) {
  const Mesh& mesh = sigma.mesh();
  const int k = sigma.degree();
  const ReferenceTabulation tab(sigma.scalar_basis(), nullptr, 2 * k);
  auto body = [&](int t, std::vector<std::vector<Triplet>>& out) {
    const auto geom = element_geometry(mesh, t);
    const auto& dofs = sigma.local_dofs(t);
    const int n = static_cast<int>(dofs.size());
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    std::vector<StressValue> s(n);
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      const double w = tab.rule.weights[q] * geom.area();
      for (int i = 0; i < n; ++i) {
        s[i] = stress_shape(dofs[i].direction, tab.value(q, dofs[i].local_node),
                            geom.gradient(tab.partials(q, dofs[i].local_node)));
      }
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          g(i, j) += w * (frobenius(s[i].value, s[j].value) + s[i].divergence.dot(s[j].divergence));
        }
      }
    }
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) out[0].emplace_back(dofs[i].global, dofs[j].global, g(i, j));
    }
  };
  const auto parts = detail::parallel_elements(mesh.num_triangles(), 1, 1, body);
  return detail::merge(parts, 0, sigma.dim(), sigma.dim()).compress();
}

/// Mass matrix of the displacement basis (the identity up to rounding, since the basis is
/// L2-orthonormal per element).
inline SparseMatrix assemble_displacement_mass(const DisplacementSpace& disp) {
  const Mesh& mesh = disp.mesh();
  const int np = disp.basis().scalar_size();
  const QuadratureRule rule = triangle_rule(2 * (disp.degree() - 1) + 1);
  std::vector<Triplet> t;
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    const auto geom = element_geometry(mesh, e);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(np, np);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Eigen::VectorXd psi = disp.basis().scalar().evaluate(geom, geom.to_physical(rule.points[q]));
      g.noalias() += rule.weights[q] * geom.area() * psi * psi.transpose();
    }
    for (int c = 0; c < 2; ++c) {
      for (int i = 0; i < np; ++i) {
        for (int j = 0; j < np; ++j) t.emplace_back(disp.index(e, c, i), disp.index(e, c, j), g(i, j));
      }
    }
  }
  SparseMatrix m(disp.dim(), disp.dim());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

/// Matrix Market coordinate format, general storage, 1-based indices.
inline void write_matrix_market(std::ostream& os, const SparseMatrix& m) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  os << std::setprecision(17);
  for (int c = 0; c < m.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
      os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
    }
  }
}

/// Matrix Market dense array format for a column vector.
inline void write_matrix_market(std::ostream& os, const Eigen::VectorXd& v) {
  os << "%%MatrixMarket matrix array real general\n";
  os << v.size() << " 1\n";
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < v.size(); ++i) os << v(i) << '\n';
}

}  // namespace mixfem
