#pragma once

/// @file solver.hpp
/// Direct sparse solve of the symmetric indefinite saddle system.
///
/// The full matrix [[M, B^T], [B, 0]] is factorized by Eigen's supernodal SparseLU with a
/// COLAMD column ordering and partial pivoting, which handles the zero block without any
/// regularization. A few steps of iterative refinement follow.

#include "assembly.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mixfem {

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

struct SolveOptions {
  double residual_tolerance = 1e-10;
  /// Refinement stops once the relative residual is below this value.
  double refinement_target = 1e-14;
  int max_refinement_steps = 3;
};

struct SaddleSolution {
  Eigen::VectorXd stress;
  Eigen::VectorXd displacement;
  /// ||K z - rhs||_2 / ||rhs||_2 (absolute residual when rhs = 0).
  double relative_residual = 0.0;
  std::vector<double> residual_history;
};

inline double relative_residual(const SparseMatrix& k, const Eigen::VectorXd& z, const Eigen::VectorXd& rhs) {
  const double r = (k * z - rhs).norm();
  const double b = rhs.norm();
  return b > 0.0 ? r / b : r;
}

inline SaddleSolution solve(const SaddleSystem& system, const SolveOptions& opts = {}) {
  if (system.B.cols() != system.M.cols() || system.M.rows() != system.M.cols() ||
      system.F.size() != system.B.rows()) {
    throw std::invalid_argument("solve: inconsistent saddle system dimensions");
  }
  const SparseMatrix k = system.kkt();
  const Eigen::VectorXd rhs = system.rhs();

  SaddleSolution out;
  if (rhs.norm() == 0.0) {
    out.stress = Eigen::VectorXd::Zero(system.dim_stress());
    out.displacement = Eigen::VectorXd::Zero(system.dim_displacement());
    out.residual_history = {0.0};
    return out;
  }

  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(k);
  lu.factorize(k);
  if (lu.info() != Eigen::Success) {
    throw SolverError("solve: factorization failed (singular system): " + lu.lastErrorMessage(), {});
  }
  Eigen::VectorXd z = lu.solve(rhs);
  out.residual_history.push_back(relative_residual(k, z, rhs));
  for (int step = 0; step < opts.max_refinement_steps && out.residual_history.back() > opts.refinement_target;
       ++step) {
    z += lu.solve(rhs - k * z);
    out.residual_history.push_back(relative_residual(k, z, rhs));
  }
  out.relative_residual = out.residual_history.back();
  if (!std::isfinite(out.relative_residual) || out.relative_residual > opts.residual_tolerance) {
    std::ostringstream msg;
    msg << "solve: relative residual " << out.relative_residual << " exceeds " << opts.residual_tolerance
        << " (numerically rank-deficient system?)";
    throw SolverError(msg.str(), out.residual_history);
  }
  out.stress = z.head(system.dim_stress());
  out.displacement = z.tail(system.dim_displacement());
  return out;
}

}  // namespace mixfem
