#pragma once

/// @file verify.hpp
/// Executable checks of the discrete stability theory: normal continuity of the stress
/// space, div Sigma_h in V_h, the local bubble divergence map, orthogonality of bubble
/// divergences to rigid motions, a dense inf-sup estimate, and the rank-one matrix identity.

#include "assembly.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace mixfem {

struct CheckResult {
  std::string name;
  bool passed = false;
  /// Measured quantity compared against `tolerance` (meaning depends on the check).
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
  nlohmann::json data = nlohmann::json::object();
};

inline nlohmann::json to_json(const CheckResult& r) {
  nlohmann::json j = {{"name", r.name},   {"passed", r.passed}, {"value", r.value},
                      {"tolerance", r.tolerance}, {"detail", r.detail}};
  if (!r.data.empty()) j["data"] = r.data;
  return j;
}

/// Deliberate defects injected into a copy of the stress space.
enum class Corruption {
  none,
  /// The restriction of one interior edge-flux function to one of its two elements changes sign.
  flipped_restriction_sign,
  /// One edge-bubble restriction uses n n^T instead of t t^T, so its normal component leaks.
  misaligned_bubble,
};

inline const char* to_string(Corruption c) {
  switch (c) {
    case Corruption::none: return "none";
    case Corruption::flipped_restriction_sign: return "flipped-restriction-sign";
    case Corruption::misaligned_bubble: return "misaligned-bubble";
  }
  return "?";
}

/// Returns a copy of `space` with the requested defect on the first interior edge.
inline StressSpace corrupt(const StressSpace& space, Corruption c) {
  StressSpace out = space;
  if (c == Corruption::none) return out;
  const Mesh& mesh = space.mesh();
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto& edge = mesh.edges[e];
    if (edge.is_boundary()) continue;
    const int t = edge.adjacent_triangles[1];
    const auto frame = edge_matrix_frame(edge);
    for (auto& d : out.mutable_local_dofs(t)) {
      const auto& f = space.function(d.global);
      if (f.node != mesh.num_vertices() + e * (space.degree() - 1)) continue;
      if (c == Corruption::flipped_restriction_sign && f.cls == StressClass::edge_flux) {
        d.direction = -d.direction;
        return out;
      }
      if (c == Corruption::misaligned_bubble && f.cls == StressClass::edge_bubble) {
        d.direction = frame.perp1;
        return out;
      }
    }
  }
  throw std::invalid_argument("corrupt: mesh has no interior edge");
}

/// Max over interior edges, stress functions touching the edge, and Gauss points of the
/// normal jump |sigma|_K1 n - sigma|_K2 n|, divided by max(1, largest |sigma n| seen for that
/// function).
inline CheckResult check_hdiv_conformity(const StressSpace& space, double tolerance = 1e-12) {
  const Mesh& mesh = space.mesh();
  const auto& basis = space.scalar_basis();
  const QuadratureRule rule = edge_rule(2 * space.degree());
  const int nn = basis.size();
  std::vector<double> values(nn);
  std::vector<std::array<double, 3>> dl(nn);

  double worst = 0.0;
  int worst_edge = -1, worst_function = -1, checked = 0;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto& edge = mesh.edges[e];
    if (edge.is_boundary()) continue;
    const int t0 = edge.adjacent_triangles[0], t1 = edge.adjacent_triangles[1];
    const std::array<ElementGeometry, 2> geom{element_geometry(mesh, t0), element_geometry(mesh, t1)};
    const Point2& a = mesh.points[edge.vertex_ids[0]];
    const Point2& b = mesh.points[edge.vertex_ids[1]];

    // jump[global] per Gauss point, plus the magnitude scale per function.
    std::vector<int> ids;
    for (int t : {t0, t1}) {
      for (const auto& d : space.local_dofs(t)) ids.push_back(d.global);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::vector<std::vector<Vec2>> trace(ids.size(), std::vector<Vec2>(2 * rule.size(), Vec2::Zero()));

    for (int side = 0; side < 2; ++side) {
      const int t = side == 0 ? t0 : t1;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point2 x = rule.points[q][0] * a + rule.points[q][1] * b;
        basis.evaluate_unchecked(geom[side].barycentric(x), values, dl);
        for (const auto& d : space.local_dofs(t)) {
          const auto pos = std::lower_bound(ids.begin(), ids.end(), d.global) - ids.begin();
          trace[pos][side * rule.size() + q] += values[d.local_node] * d.direction.apply(edge.unit_normal);
        }
      }
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
      double scale = 1.0, jump = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Vec2& s0 = trace[i][q];
        const Vec2& s1 = trace[i][rule.size() + q];
        scale = std::max({scale, s0.norm(), s1.norm()});
        jump = std::max(jump, (s0 - s1).norm());
      }
      ++checked;
      if (jump / scale > worst) {
        worst = jump / scale;
        worst_edge = e;
        worst_function = ids[i];
      }
    }
  }
  CheckResult r;
  r.name = "hdiv_conformity";
  r.value = worst;
  r.tolerance = tolerance;
  r.passed = worst <= tolerance;
  r.data = {{"pairs_checked", checked}, {"worst_edge", worst_edge}, {"worst_function", worst_function}};
  r.detail = "max normal jump " + std::to_string(worst) + " at edge " + std::to_string(worst_edge) + ", function " +
             std::to_string(worst_function);
  return r;
}

/// For every element and local stress function phi D: ||div - Pi div|| / ||grad phi|| on K, with Pi
/// the L2(K) projection onto P_{projection_degree}^2 (default k - 1). The scale is the full
/// gradient because div can vanish identically (a vertex function depends on one barycentric
/// coordinate only).
inline CheckResult check_div_inclusion(const StressSpace& space, int projection_degree = -1,
                                       double tolerance = 1e-12) {
  const Mesh& mesh = space.mesh();
  const int k = space.degree();
  if (projection_degree < 0) projection_degree = k - 1;
  const OrthonormalPolynomials proj(projection_degree);
  const ReferenceTabulation tab(space.scalar_basis(), &proj, 2 * k);
  const int np = proj.size();

  double worst = 0.0;
  int worst_element = -1, worst_function = -1, checked = 0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto geom = element_geometry(mesh, t);
    const double psi_scale = 1.0 / std::sqrt(2.0 * geom.area());
    for (const auto& d : space.local_dofs(t)) {
      std::vector<Vec2> div(tab.rule.size());
      Eigen::MatrixXd c = Eigen::MatrixXd::Zero(np, 2);
      for (std::size_t q = 0; q < tab.rule.size(); ++q) {
        div[q] = d.direction.apply(geom.gradient(tab.partials(q, d.local_node)));
        const double w = tab.rule.weights[q] * geom.area() * psi_scale;
        c.col(0) += w * div[q].x() * tab.displacement[q];
        c.col(1) += w * div[q].y() * tab.displacement[q];
      }
      double res = 0.0, norm = 0.0;
      for (std::size_t q = 0; q < tab.rule.size(); ++q) {
        const double w = tab.rule.weights[q] * geom.area();
        const Vec2 p(psi_scale * c.col(0).dot(tab.displacement[q]), psi_scale * c.col(1).dot(tab.displacement[q]));
        res += w * (div[q] - p).squaredNorm();
        norm += w * geom.gradient(tab.partials(q, d.local_node)).squaredNorm();
      }
      ++checked;
      if (norm == 0.0) continue;
      const double rel = std::sqrt(res / norm);
      if (rel > worst) {
        worst = rel;
        worst_element = t;
        worst_function = d.global;
      }
    }
  }
  CheckResult r;
  r.name = "div_inclusion";
  r.value = worst;
  r.tolerance = tolerance;
  r.passed = worst <= tolerance;
  r.data = {{"projection_degree", projection_degree},
            {"pairs_checked", checked},
            {"worst_element", worst_element},
            {"worst_function", worst_function}};
  r.detail = "max relative projection residual " + std::to_string(worst) + " onto P" +
             std::to_string(projection_degree);
  return r;
}

/// Triangle translated to its centroid and scaled to unit diameter.
inline ElementGeometry scaled_frame(const std::array<Point2, 3>& v) {
  const Point2 c = (v[0] + v[1] + v[2]) / 3.0;
  const double diam = std::max({(v[1] - v[0]).norm(), (v[2] - v[1]).norm(), (v[0] - v[2]).norm()});
  if (!(diam > 0.0)) throw std::invalid_argument("local check: degenerate triangle");
  return ElementGeometry::from_vertices((v[0] - c) / diam, (v[1] - c) / diam, (v[2] - c) / diam);
}

/// Local bubble stresses lambda_{i+1} lambda_{i+2} p t_i t_i^T, t_i the unit tangent of the edge
/// opposite vertex i and p a barycentric monomial of degree k - 2.
struct LocalBubble {
  std::array<int, 3> exponents{};  // of lambda_{i+1} lambda_{i+2} p
  SymMatrix2 direction;
};

inline std::vector<LocalBubble> local_bubbles(int k, const ElementGeometry& geom) {
  std::vector<LocalBubble> out;
  for (int i = 0; i < 3; ++i) {
    const Vec2 t = (geom.vertices[(i + 2) % 3] - geom.vertices[(i + 1) % 3]).normalized();
    for (auto e : barycentric_exponents(k - 2)) {
      e[(i + 1) % 3] += 1;
      e[(i + 2) % 3] += 1;
      out.push_back({e, SymMatrix2::outer(t)});
    }
  }
  return out;
}

/// Matrix D(r, j) = (div tau_j, v_r) over an L2-orthonormal basis v_r of P_{k-1}^2.
inline Eigen::MatrixXd local_divergence_matrix(int k, const ElementGeometry& geom,
                                                const std::vector<LocalBubble>& taus) {
  const OrthonormalPolynomials poly(k - 1);
  const QuadratureRule rule = triangle_rule(2 * k);
  const int np = poly.size();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2 * np, static_cast<int>(taus.size()));
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const BarycentricPowers pw(rule.points[q], k);
    const Eigen::VectorXd v = poly.evaluate(rule.points[q]) / std::sqrt(2.0 * geom.area());
    const double w = rule.weights[q] * geom.area();
    for (std::size_t j = 0; j < taus.size(); ++j) {
      std::array<double, 3> dm{};
      barycentric_monomial(pw, taus[j].exponents, &dm);
      const Vec2 div = taus[j].direction.apply(geom.gradient(dm));
      d.col(j).head(np) += w * div.x() * v;
      d.col(j).tail(np) += w * div.y() * v;
    }
  }
  return d;
}

struct RankReport {
  int rank = 0;
  int nullity = 0;
  int columns = 0;
  std::vector<double> singular_values;
};

inline RankReport local_divergence_rank(int k, const std::array<Point2, 3>& triangle, double threshold = 1e-10) {
  if (k < 3) throw std::invalid_argument("local_divergence_rank: k must be >= 3");
  const auto geom = scaled_frame(triangle);
  const Eigen::MatrixXd d = local_divergence_matrix(k, geom, local_bubbles(k, geom));
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(d);
  const auto& s = svd.singularValues();
  RankReport r;
  r.columns = static_cast<int>(d.cols());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    r.singular_values.push_back(s(i));
    if (s(i) > threshold * s(0)) ++r.rank;
  }
  r.nullity = r.columns - r.rank;
  return r;
}

/// Expected (rank, nullity) of the local bubble divergence map: 3 dim P_{k-2} - dim P_{k-4}.
inline std::pair<int, int> expected_local_rank(int k) {
  const int nullity = dim_polynomials(k - 4);
  return {3 * dim_polynomials(k - 2) - nullity, nullity};
}

/// Worst |(div tau, r)| / (||div tau|| ||r||) over the local bubbles and the rigid motions
/// r = (1, 0), (0, 1), (-y, x) in the scaled frame. With `non_bubble` the stresses are
/// lambda_0^k T_c instead, which do not vanish in the normal direction on the boundary.
inline double rigid_motion_orthogonality(int k, const std::array<Point2, 3>& triangle, bool non_bubble = false) {
  const auto geom = scaled_frame(triangle);
  std::vector<LocalBubble> taus;
  if (non_bubble) {
    for (const auto& dir : kCanonicalDirections) taus.push_back({{k, 0, 0}, dir});
  } else {
    taus = local_bubbles(k, geom);
  }
  const QuadratureRule rule = triangle_rule(2 * k);
  double worst = 0.0;
  for (const auto& tau : taus) {
    std::array<double, 3> inner{}, rnorm{};
    double dnorm = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const BarycentricPowers pw(rule.points[q], k);
      std::array<double, 3> dm{};
      barycentric_monomial(pw, tau.exponents, &dm);
      const Vec2 div = tau.direction.apply(geom.gradient(dm));
      const Point2 x = geom.to_physical(rule.points[q]);
      const std::array<Vec2, 3> rigid{Vec2(1, 0), Vec2(0, 1), Vec2(-x.y(), x.x())};
      const double w = rule.weights[q] * geom.area();
      dnorm += w * div.squaredNorm();
      for (int m = 0; m < 3; ++m) {
        inner[m] += w * div.dot(rigid[m]);
        rnorm[m] += w * rigid[m].squaredNorm();
      }
    }
    for (int m = 0; m < 3; ++m) worst = std::max(worst, std::abs(inner[m]) / std::sqrt(dnorm * rnorm[m]));
  }
  return worst;
}

struct InfSupReport {
  /// Square root of the smallest eigenvalue of B X^{-1} B^T y = beta^2 N y above the zero threshold.
  double beta = 0.0;
  /// Eigenvalues below 1e-10 times the largest (a non-surjective B would show up here).
  int zero_modes = 0;
  int dim_stress = 0;
  int dim_displacement = 0;
};

inline constexpr int kInfSupMaxDimension = 4000;

inline InfSupReport discrete_infsup_estimate(const Mesh& mesh, int k, int max_dimension = kInfSupMaxDimension) {
  const StressSpace sigma(mesh, k);
  const DisplacementSpace disp(mesh, k);
  if (sigma.dim() + disp.dim() > max_dimension) {
    throw std::invalid_argument("discrete_infsup_estimate: dimension " + std::to_string(sigma.dim() + disp.dim()) +
                                " exceeds the dense cap " + std::to_string(max_dimension));
  }
  const ComplianceTensor unit(0.5, 1.0);
  const SaddleSystem sys = assemble(sigma, disp, unit, {});
  const Eigen::MatrixXd x(assemble_hdiv_gram(sigma));
  const Eigen::MatrixXd n(assemble_displacement_mass(disp));
  const Eigen::MatrixXd b(sys.B);
  const Eigen::LLT<Eigen::MatrixXd> llt(x);
  if (llt.info() != Eigen::Success) throw std::runtime_error("discrete_infsup_estimate: H(div) Gram not SPD");
  Eigen::MatrixXd s = b * llt.solve(b.transpose());
  s = 0.5 * (s + s.transpose());
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, n);
  if (eig.info() != Eigen::Success) throw std::runtime_error("discrete_infsup_estimate: eigensolver failed");
  const Eigen::VectorXd& ev = eig.eigenvalues();
  InfSupReport r;
  r.dim_stress = sigma.dim();
  r.dim_displacement = disp.dim();
  const double cut = 1e-10 * ev.maxCoeff();
  double smallest = -1.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) <= cut) {
      ++r.zero_modes;
    } else if (smallest < 0.0 || ev(i) < smallest) {
      smallest = ev(i);
    }
  }
  r.beta = smallest > 0.0 ? std::sqrt(smallest) : 0.0;
  return r;
}

struct Lemma3Result {
  double determinant = 0.0;
  double expected = 0.0;
};

/// Determinant of the component matrix of v1 v1^T, v2 v2^T, v0 v0^T (v0 = v1 + v2), columns
/// (x^2, y^2, xy); equals (a1 b2 - a2 b1)^3.
inline Lemma3Result lemma3_check(const Vec2& v1, const Vec2& v2) {
  const Vec2 v0 = v1 + v2;
  Eigen::Matrix3d m;
  m << v1.x() * v1.x(), v2.x() * v2.x(), v0.x() * v0.x(), v1.y() * v1.y(), v2.y() * v2.y(), v0.y() * v0.y(),
      v1.x() * v1.y(), v2.x() * v2.y(), v0.x() * v0.y();
  const double c = v1.x() * v2.y() - v1.y() * v2.x();
  return {m.determinant(), c * c * c};
}

/// Natural magnitude of the determinant: each column has norm about |v|^2, so rounding error
/// in det scales with (|v1| |v2|)^3 even when the determinant itself is tiny.
inline double lemma3_scale(const Vec2& v1, const Vec2& v2) {
  const double s = v1.norm() * v2.norm();
  return s * s * s;
}

/// Random triangle with vertices in the unit square and shape ratio 4|K|/(sqrt 3 diam^2) >= 0.05.
inline std::array<Point2, 3> random_triangle(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    std::array<Point2, 3> v{Point2(u(rng), u(rng)), Point2(u(rng), u(rng)), Point2(u(rng), u(rng))};
    const double area = 0.5 * std::abs((v[1] - v[0]).x() * (v[2] - v[0]).y() - (v[1] - v[0]).y() * (v[2] - v[0]).x());
    const double diam = std::max({(v[1] - v[0]).norm(), (v[2] - v[1]).norm(), (v[0] - v[2]).norm()});
    if (diam > 1e-3 && 4.0 * area / (std::sqrt(3.0) * diam * diam) >= 0.05) return v;
  }
}

struct VerifyOptions {
  /// At least one.
  int random_triangles = 100;
  int lemma3_pairs = 1000;
  std::uint64_t seed = 20240601;
  Corruption corruption = Corruption::none;
  bool infsup = true;
};

struct VerifyReport {
  int k = 0;
  int level = 0;
  std::vector<CheckResult> checks;

  [[nodiscard]] bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }
  [[nodiscard]] std::vector<std::string> failures() const {
    std::vector<std::string> out;
    for (const auto& c : checks) {
      if (!c.passed) out.push_back(c.name);
    }
    return out;
  }
};

inline nlohmann::json to_json(const VerifyReport& r) {
  nlohmann::json j = {{"k", r.k}, {"level", r.level}, {"passed", r.passed()}};
  auto& checks = j["checks"] = nlohmann::json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  j["failures"] = r.failures();
  return j;
}

/// Runs every check for degree k on the unit square mesh at `level`. Negative controls are
/// included as checks that pass when the defect is detected. With a corruption the primary
/// conformity check runs on the damaged space and is expected to fail.
inline VerifyReport run_verification(int k, int level, const VerifyOptions& opts = {}) {
  if (k < 3 || k > 5) throw std::invalid_argument("run_verification: k must be 3, 4 or 5");
  if (opts.random_triangles < 1) throw std::invalid_argument("run_verification: need at least one random triangle");
  const Mesh mesh = build_unit_square_mesh(level);
  const StressSpace space(mesh, k);
  VerifyReport report;
  report.k = k;
  report.level = level;

  {
    const StressSpace tested = corrupt(space, opts.corruption);
    CheckResult c = check_hdiv_conformity(tested);
    c.data["corruption"] = to_string(opts.corruption);
    report.checks.push_back(std::move(c));
  }
  report.checks.push_back(check_div_inclusion(space));

  std::mt19937_64 rng(opts.seed);
  {
    const auto [rank, nullity] = expected_local_rank(k);
    CheckResult c;
    c.name = "local_divergence_rank";
    c.tolerance = 0.0;
    int mismatches = 0;
    double smallest_ratio = 1.0;
    std::vector<int> ranks, nullities;
    for (int i = 0; i < opts.random_triangles; ++i) {
      const auto r = local_divergence_rank(k, random_triangle(rng));
      ranks.push_back(r.rank);
      nullities.push_back(r.nullity);
      if (r.rank != rank || r.nullity != nullity) ++mismatches;
      if (r.rank > 0) smallest_ratio = std::min(smallest_ratio, r.singular_values[r.rank - 1] / r.singular_values[0]);
    }
    c.value = mismatches;
    c.passed = mismatches == 0;
    const auto [rmin, rmax] = std::minmax_element(ranks.begin(), ranks.end());
    const auto [nmin, nmax] = std::minmax_element(nullities.begin(), nullities.end());
    c.data = {{"rank", nlohmann::json::array({*rmin, *rmax})},
              {"nullity", nlohmann::json::array({*nmin, *nmax})},
              {"expected_rank", rank},
              {"expected_nullity", nullity},
              {"triangles", opts.random_triangles},
              {"smallest_retained_singular_ratio", smallest_ratio}};
    c.detail = std::to_string(mismatches) + " of " + std::to_string(opts.random_triangles) +
               " triangles differ from (rank " + std::to_string(rank) + ", nullity " + std::to_string(nullity) + ")";
    report.checks.push_back(std::move(c));
  }
  {
    CheckResult c;
    c.name = "rigid_motion_orthogonality";
    c.tolerance = 1e-12;
    for (int i = 0; i < opts.random_triangles; ++i) {
      c.value = std::max(c.value, rigid_motion_orthogonality(k, random_triangle(rng)));
    }
    c.passed = c.value <= c.tolerance;
    c.detail = "max normalized (div tau_b, r) over bubbles and rigid motions";
    report.checks.push_back(std::move(c));
  }
  {
    CheckResult c;
    c.name = "lemma3_determinant";
    c.tolerance = 1e-10;
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < opts.lemma3_pairs; ++i) {
      const Vec2 v1(g(rng), g(rng)), v2(g(rng), g(rng));
      const auto r = lemma3_check(v1, v2);
      c.value = std::max(c.value, std::abs(r.determinant - r.expected) / lemma3_scale(v1, v2));
    }
    c.passed = c.value <= c.tolerance;
    c.detail = "max deviation from (a1 b2 - a2 b1)^3 relative to (|v1| |v2|)^3 over " + std::to_string(opts.lemma3_pairs) + " pairs";
    report.checks.push_back(std::move(c));
  }
  if (opts.infsup) {
    CheckResult c;
    c.name = "discrete_infsup";
    const auto r = discrete_infsup_estimate(mesh, k);
    c.value = r.beta;
    c.tolerance = 0.0;
    c.passed = r.beta > 0.0 && r.zero_modes == 0;
    c.data = {{"beta", r.beta}, {"zero_modes", r.zero_modes}, {"dim_stress", r.dim_stress},
              {"dim_displacement", r.dim_displacement}};
    c.detail = "beta_h = " + std::to_string(r.beta);
    report.checks.push_back(std::move(c));
  }

  // Negative controls: each passes when the defect is caught.
  {
    CheckResult c;
    c.name = "control_conformity_detects_sign_flip";
    const auto r = check_hdiv_conformity(corrupt(space, Corruption::flipped_restriction_sign));
    c.value = r.value;
    c.tolerance = 1e-12;
    c.passed = !r.passed;
    c.detail = "jump with one flipped edge restriction: " + std::to_string(r.value);
    report.checks.push_back(std::move(c));
  }
  {
    CheckResult c;
    c.name = "control_conformity_detects_misaligned_bubble";
    const auto r = check_hdiv_conformity(corrupt(space, Corruption::misaligned_bubble));
    c.value = r.value;
    c.tolerance = 1e-12;
    c.passed = !r.passed;
    c.detail = "jump with one n n^T bubble: " + std::to_string(r.value);
    report.checks.push_back(std::move(c));
  }
  {
    CheckResult c;
    c.name = "control_div_inclusion_low_degree";
    const auto r = check_div_inclusion(space, k - 2);
    c.value = r.value;
    c.tolerance = 1e-12;
    c.passed = !r.passed;
    c.detail = "residual after projecting onto P" + std::to_string(k - 2) + ": " + std::to_string(r.value);
    report.checks.push_back(std::move(c));
  }
  {
    CheckResult c;
    c.name = "control_rigid_motion_non_bubble";
    c.value = rigid_motion_orthogonality(k, random_triangle(rng), true);
    c.tolerance = 1e-12;
    c.passed = c.value > c.tolerance;
    c.detail = "non-bubble stress against rigid motions: " + std::to_string(c.value);
    report.checks.push_back(std::move(c));
  }
  return report;
}

}  // namespace mixfem
