#pragma once

/// @file analysis.hpp
/// Manufactured solutions, L2 error norms and convergence studies on the unit square.

#include "solver.hpp"

#include <array>
#include <cmath>
#include <iomanip>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace mixfem {

/// Closed-form displacement with its first and second derivatives. Stress and load follow
/// from the Lame constants: sigma = 2 mu eps(u) + lambda tr(eps(u)) I, f = div sigma.
class ManufacturedSolution {
 public:
  virtual ~ManufacturedSolution() = default;
  [[nodiscard]] virtual Vec2 displacement(const Point2& p) const = 0;
  /// grad(i, j) = d u_i / d x_j.
  [[nodiscard]] virtual Mat2 gradient(const Point2& p) const = 0;
  /// hessians[i](j, l) = d^2 u_i / d x_j d x_l.
  [[nodiscard]] virtual std::array<Mat2, 2> hessians(const Point2& p) const = 0;

  [[nodiscard]] SymMatrix2 strain(const Point2& p) const {
    const Mat2 g = gradient(p);
    return {g(0, 0), 0.5 * (g(0, 1) + g(1, 0)), g(1, 1)};
  }

  [[nodiscard]] SymMatrix2 stress(const Point2& p, const ComplianceTensor& a) const {
    return a.stiffness(strain(p));
  }

  /// f_i = mu Lap u_i + (mu + lambda) d_i div u.
  [[nodiscard]] Vec2 load(const Point2& p, const ComplianceTensor& a) const {
    const auto h = hessians(p);
    const Vec2 grad_div(h[0](0, 0) + h[1](1, 0), h[0](0, 1) + h[1](1, 1));
    return {a.mu() * h[0].trace() + (a.mu() + a.lambda()) * grad_div.x(),
            a.mu() * h[1].trace() + (a.mu() + a.lambda()) * grad_div.y()};
  }
};

/// u = (e^{x-y} x(1-x) y(1-y), sin(pi x) sin(pi y)).
class ExponentialSineSolution final : public ManufacturedSolution {
 public:
  [[nodiscard]] Vec2 displacement(const Point2& p) const override {
    const double x = p.x(), y = p.y();
    return {std::exp(x - y) * x * (1 - x) * y * (1 - y), std::sin(kPi * x) * std::sin(kPi * y)};
  }

  [[nodiscard]] Mat2 gradient(const Point2& p) const override {
    const auto a = ex(p.x());
    const auto b = emy(p.y());
    const double sx = std::sin(kPi * p.x()), cx = std::cos(kPi * p.x());
    const double sy = std::sin(kPi * p.y()), cy = std::cos(kPi * p.y());
    Mat2 g;
    g << a[1] * b[0], a[0] * b[1], kPi * cx * sy, kPi * sx * cy;
    return g;
  }

  [[nodiscard]] std::array<Mat2, 2> hessians(const Point2& p) const override {
    const auto [a, da, dda] = ex(p.x());
    const auto [b, db, ddb] = emy(p.y());
    const double sx = std::sin(kPi * p.x()), cx = std::cos(kPi * p.x());
    const double sy = std::sin(kPi * p.y()), cy = std::cos(kPi * p.y());
    const double pi2 = kPi * kPi;
    Mat2 h0, h1;
    h0 << dda * b, da * db, da * db, a * ddb;
    h1 << -pi2 * sx * sy, pi2 * cx * cy, pi2 * cx * cy, -pi2 * sx * sy;
    return {h0, h1};
  }

 private:
  static constexpr double kPi = std::numbers::pi;

  /// a(x) = e^x x(1-x) and its first two derivatives.
  static std::array<double, 3> ex(double x) {
    const double e = std::exp(x), g = x * (1 - x), dg = 1 - 2 * x;
    return {e * g, e * (g + dg), e * (g + 2 * dg - 2)};
  }
  /// b(y) = e^{-y} y(1-y) and its first two derivatives.
  static std::array<double, 3> emy(double y) {
    const double e = std::exp(-y), g = y * (1 - y), dg = 1 - 2 * y;
    return {e * g, e * (dg - g), e * (-2 - 2 * dg + g)};
  }
};

/// u = c (w, w) with w = x(1-x) y(1-y): a degree-4 field vanishing on the boundary.
class PolynomialBubbleSolution final : public ManufacturedSolution {
 public:
  explicit PolynomialBubbleSolution(double scale = 1.0) : c_(scale) {}

  [[nodiscard]] Vec2 displacement(const Point2& p) const override {
    const double w = c_ * p.x() * (1 - p.x()) * p.y() * (1 - p.y());
    return {w, w};
  }
  [[nodiscard]] Mat2 gradient(const Point2& p) const override {
    const double gx = p.x() * (1 - p.x()), gy = p.y() * (1 - p.y());
    const double wx = c_ * (1 - 2 * p.x()) * gy, wy = c_ * gx * (1 - 2 * p.y());
    Mat2 g;
    g << wx, wy, wx, wy;
    return g;
  }
  [[nodiscard]] std::array<Mat2, 2> hessians(const Point2& p) const override {
    const double gx = p.x() * (1 - p.x()), gy = p.y() * (1 - p.y());
    Mat2 h;
    h << -2 * c_ * gy, c_ * (1 - 2 * p.x()) * (1 - 2 * p.y()), c_ * (1 - 2 * p.x()) * (1 - 2 * p.y()), -2 * c_ * gx;
    return {h, h};
  }

 private:
  double c_;
};

struct ExactFields {
  Vec2 u;
  SymMatrix2 sigma;
  Vec2 f;
};

inline ExactFields exact_fields(const ManufacturedSolution& sol, const ComplianceTensor& a, const Point2& p) {
  return {sol.displacement(p), sol.stress(p, a), sol.load(p, a)};
}

struct ErrorReport {
  int level = 0;
  int k = 0;
  double err_u = 0.0;          // ||u - u_h||_0
  double err_sigma = 0.0;      // ||sigma - sigma_h||_0
  double err_div = 0.0;        // ||div(sigma - sigma_h)||_0
  int dim_v = 0;
  int dim_sigma = 0;
  /// ||div sigma_h - Pi_h f||_0 / ||f||_0 with Pi_h the elementwise L2 projection onto P_{k-1}.
  double div_identity = 0.0;
  double solver_residual = 0.0;
};

/// Element-wise L2 errors with a rule of degree 2k + 4; div sigma_h is evaluated analytically.
inline ErrorReport compute_errors(const StressSpace& sigma, const DisplacementSpace& disp, const SaddleSolution& sol,
                                  const ManufacturedSolution& exact, const ComplianceTensor& a) {
  const Mesh& mesh = sigma.mesh();
  const int k = sigma.degree();
  const ReferenceTabulation tab(sigma.scalar_basis(), &disp.basis().scalar(), 2 * k + 4);
  const int np = disp.basis().scalar_size();
  double eu = 0, es = 0, ed = 0, eid = 0, fnorm = 0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto geom = element_geometry(mesh, t);
    const auto& dofs = sigma.local_dofs(t);
    const double psi_scale = 1.0 / std::sqrt(2.0 * geom.area());
    // Pi_h f coefficients on this element.
    Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(np, 2);
    std::vector<Vec2> fq(tab.rule.size());
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      fq[q] = exact.load(geom.to_physical(tab.rule.points[q]), a);
      const double w = tab.rule.weights[q] * geom.area() * psi_scale;
      proj.col(0) += w * fq[q].x() * tab.displacement[q];
      proj.col(1) += w * fq[q].y() * tab.displacement[q];
    }
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      const Point2 x = geom.to_physical(tab.rule.points[q]);
      const double w = tab.rule.weights[q] * geom.area();
      SymMatrix2 sh;
      Vec2 dh = Vec2::Zero();
      for (const auto& d : dofs) {
        const double c = sol.stress(d.global);
        const auto s = stress_shape(d.direction, tab.value(q, d.local_node), geom.gradient(tab.partials(q, d.local_node)));
        sh += c * s.value;
        dh += c * s.divergence;
      }
      Vec2 uh = Vec2::Zero();
      Vec2 pf = Vec2::Zero();
      for (int m = 0; m < np; ++m) {
        const double psi = psi_scale * tab.displacement[q](m);
        uh.x() += sol.displacement(disp.index(t, 0, m)) * psi;
        uh.y() += sol.displacement(disp.index(t, 1, m)) * psi;
        pf.x() += proj(m, 0) * psi;
        pf.y() += proj(m, 1) * psi;
      }
      const SymMatrix2 ds = exact.stress(x, a) - sh;
      eu += w * (exact.displacement(x) - uh).squaredNorm();
      es += w * frobenius(ds, ds);
      ed += w * (fq[q] - dh).squaredNorm();
      eid += w * (dh - pf).squaredNorm();
      fnorm += w * fq[q].squaredNorm();
    }
  }
  ErrorReport r;
  r.level = mesh.level;
  r.k = k;
  r.err_u = std::sqrt(eu);
  r.err_sigma = std::sqrt(es);
  r.err_div = std::sqrt(ed);
  r.dim_v = disp.dim();
  r.dim_sigma = sigma.dim();
  r.div_identity = fnorm > 0 ? std::sqrt(eid / fnorm) : std::sqrt(eid);
  r.solver_residual = sol.relative_residual;
  return r;
}

struct ConvergenceTable {
  int k = 0;
  std::vector<ErrorReport> rows;

  /// log2(e_{l-1} / e_l) for (u, sigma, div) at row i; empty for the first row.
  [[nodiscard]] std::optional<std::array<double, 3>> orders(std::size_t i) const {
    if (i == 0 || i >= rows.size()) return std::nullopt;
    const auto& a = rows[i - 1];
    const auto& b = rows[i];
    return std::array<double, 3>{std::log2(a.err_u / b.err_u), std::log2(a.err_sigma / b.err_sigma),
                                 std::log2(a.err_div / b.err_div)};
  }
};

struct StudyOptions {
  double mu = 0.5;
  double lambda = 1.0;
  Diagonal diagonal = Diagonal::south_west_north_east;
  AssemblyOptions assembly;
  SolveOptions solve;
  /// Called after each level is solved, with the level's system (for dumps and logging).
  std::function<void(const Mesh&, const SaddleSystem&, const ErrorReport&)> on_level;
};

inline ErrorReport run_level(int k, int level, const ManufacturedSolution& exact, const StudyOptions& opts = {}) {
  const ComplianceTensor a(opts.mu, opts.lambda);
  const Mesh mesh = build_unit_square_mesh(level, opts.diagonal);
  const StressSpace sigma(mesh, k);
  const DisplacementSpace disp(mesh, k);
  const SaddleSystem sys =
      assemble(sigma, disp, a, [&](const Point2& p) { return exact.load(p, a); }, opts.assembly);
  const SaddleSolution sol = solve(sys, opts.solve);
  ErrorReport r = compute_errors(sigma, disp, sol, exact, a);
  if (opts.on_level) opts.on_level(mesh, sys, r);
  return r;
}

inline ConvergenceTable run_study(int k, int max_level, const ManufacturedSolution& exact,
                                  const StudyOptions& opts = {}) {
  if (k < 3 || k > 5) throw std::invalid_argument("run_study: k must be 3, 4 or 5");
  if (max_level < 1) throw std::invalid_argument("run_study: max_level must be >= 1");
  ConvergenceTable table;
  table.k = k;
  for (int level = 1; level <= max_level; ++level) table.rows.push_back(run_level(k, level, exact, opts));
  return table;
}

inline ConvergenceTable run_study(int k, int max_level, const StudyOptions& opts = {}) {
  return run_study(k, max_level, ExponentialSineSolution{}, opts);
}

/// Columns: level, ||u-u_h||, order, ||sigma-sigma_h||, order, ||div||, order, dim V_h, dim Sigma_h.
inline void write_text(std::ostream& os, const ConvergenceTable& t) {
  os << "P" << t.k << " element\n";
  os << std::setw(5) << "level" << std::setw(14) << "|u-u_h|_0" << std::setw(7) << "h^n" << std::setw(14)
     << "|e_h|_0" << std::setw(7) << "h^n" << std::setw(14) << "|div e_h|_0" << std::setw(7) << "h^n"
     << std::setw(8) << "dim V" << std::setw(9) << "dim S" << '\n';
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    const auto o = t.orders(i).value_or(std::array<double, 3>{0, 0, 0});
    os << std::setw(5) << r.level << std::scientific << std::setprecision(6) << std::setw(14) << r.err_u
       << std::fixed << std::setprecision(2) << std::setw(7) << o[0] << std::scientific << std::setprecision(6)
       << std::setw(14) << r.err_sigma << std::fixed << std::setprecision(2) << std::setw(7) << o[1]
       << std::scientific << std::setprecision(6) << std::setw(14) << r.err_div << std::fixed
       << std::setprecision(2) << std::setw(7) << o[2] << std::setw(8) << r.dim_v << std::setw(9) << r.dim_sigma
       << '\n';
  }
  os.unsetf(std::ios::floatfield);
}

inline void write_csv(std::ostream& os, const ConvergenceTable& t) {
  os << "k,level,err_u,order_u,err_sigma,order_sigma,err_div,order_div,dim_v,dim_sigma\n";
  std::ostringstream line;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    const auto o = t.orders(i);
    auto ord = [&](int c) { return o ? std::to_string((*o)[c]) : std::string(); };
    line.str({});
    line << std::setprecision(10) << t.k << ',' << r.level << ',' << r.err_u << ',' << ord(0) << ',' << r.err_sigma
         << ',' << ord(1) << ',' << r.err_div << ',' << ord(2) << ',' << r.dim_v << ',' << r.dim_sigma << '\n';
    os << line.str();
  }
}

inline nlohmann::json to_json(const ConvergenceTable& t) {
  nlohmann::json j;
  j["k"] = t.k;
  auto& rows = j["rows"] = nlohmann::json::array();
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    nlohmann::json row = {{"level", r.level},
                          {"err_u", r.err_u},
                          {"err_sigma", r.err_sigma},
                          {"err_div", r.err_div},
                          {"dim_v", r.dim_v},
                          {"dim_sigma", r.dim_sigma},
                          {"div_identity", r.div_identity},
                          {"solver_residual", r.solver_residual}};
    if (const auto o = t.orders(i)) {
      row["order_u"] = (*o)[0];
      row["order_sigma"] = (*o)[1];
      row["order_div"] = (*o)[2];
    }
    rows.push_back(std::move(row));
  }
  return j;
}

}  // namespace mixfem
