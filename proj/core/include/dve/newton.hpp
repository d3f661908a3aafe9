#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <string>
#include <vector>

namespace dve {

struct NewtonConfig {
  double tol = 1e-10;                  // max-norm of the free-dof residual
  int max_iter = 50;
  double divergence_threshold = 1e10;  // abort when |R| exceeds this
  double damping = 1.0;                // optional step scaling for hard cases
};

struct NewtonReport {
  int iterations = 0;
  std::vector<double> residual_history;  // |R| before and after each step
  bool converged = false;
  std::string failure;  // empty when converged
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn =
    std::function<Eigen::SparseMatrix<double>(const Eigen::VectorXd&)>;

struct NewtonResult {
  Eigen::VectorXd dofs;
  NewtonReport report;
};

/// Newton-Raphson on R(D) = 0: repeatedly solve J dD = -R and update until
/// max|R| < tol. Failures (singular solve, divergence, iteration budget,
/// DtP breakdown inside the callbacks) are reported, not thrown. The
/// convergence flag is re-checked against a fresh residual evaluation after
/// the loop.
NewtonResult newton_solve(const ResidualFn& residual,
                          const JacobianFn& jacobian,
                          Eigen::VectorXd initial_dofs,
                          const NewtonConfig& config = {});

/// Sparse LU solve with a relative residual check (<= 1e-10).
/// Throws SingularMatrixError on factorization failure or a bad residual.
Eigen::VectorXd linear_solve(const Eigen::SparseMatrix<double>& matrix,
                             const Eigen::VectorXd& rhs);

}  // namespace dve
