#include "dve/newton.hpp"

#include <cmath>
#include <sstream>

#include "dve/errors.hpp"

namespace dve {

Eigen::VectorXd linear_solve(const Eigen::SparseMatrix<double>& matrix,
                             const Eigen::VectorXd& rhs) {
  if (matrix.rows() != matrix.cols() || matrix.rows() != rhs.size()) {
    throw SingularMatrixError("linear_solve: non-square system");
  }
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(matrix);
  lu.factorize(matrix);
  if (lu.info() != Eigen::Success) {
    throw SingularMatrixError("linear_solve: LU factorization failed");
  }
  Eigen::VectorXd x = lu.solve(rhs);
  const double scale =
      std::max({1.0, rhs.lpNorm<Eigen::Infinity>(),
                matrix.coeffs().cwiseAbs().maxCoeff() *
                    x.lpNorm<Eigen::Infinity>()});
  const double res = (matrix * x - rhs).lpNorm<Eigen::Infinity>();
  if (!(res <= 1e-10 * scale)) {
    std::ostringstream msg;
    msg << "linear_solve: relative residual " << res / scale
        << " exceeds 1e-10 (ill-conditioned system)";
    throw SingularMatrixError(msg.str());
  }
  return x;
}

NewtonResult newton_solve(const ResidualFn& residual,
                          const JacobianFn& jacobian,
                          Eigen::VectorXd initial_dofs,
                          const NewtonConfig& config) {
  NewtonResult out;
  out.dofs = std::move(initial_dofs);
  NewtonReport& rep = out.report;

  Eigen::VectorXd r;
  try {
    r = residual(out.dofs);
  } catch (const SolveError& err) {
    rep.failure = std::string("residual evaluation failed: ") + err.what();
    return out;
  }
  double rnorm = r.lpNorm<Eigen::Infinity>();
  rep.residual_history.push_back(rnorm);

  while (rnorm >= config.tol) {
    if (!std::isfinite(rnorm) || rnorm > config.divergence_threshold) {
      rep.failure = "diverged: residual exceeded threshold";
      return out;
    }
    if (rep.iterations >= config.max_iter) {
      std::ostringstream msg;
      msg << "max_iter (" << config.max_iter << ") reached, |R| = " << rnorm;
      rep.failure = msg.str();
      return out;
    }
    try {
      const Eigen::SparseMatrix<double> J = jacobian(out.dofs);
      const Eigen::VectorXd step = linear_solve(J, -r);
      // Plain Newton; the step is shortened only when the trial iterate is
      // infeasible (the pointwise mapping fails there), never on merit.
      double scale = config.damping;
      bool accepted = false;
      std::string last_failure;
      for (int cut = 0; cut < 30 && !accepted; ++cut) {
        try {
          const Eigen::VectorXd trial = out.dofs + scale * step;
          const Eigen::VectorXd r_trial = residual(trial);
          if (!r_trial.allFinite()) {
            throw SolveError("non-finite residual at trial iterate");
          }
          out.dofs = trial;
          r = r_trial;
          accepted = true;
        } catch (const SolveError& err) {
          last_failure = err.what();
          scale *= 0.5;
        }
      }
      if (!accepted) {
        rep.failure = "step infeasible after backtracking: " + last_failure;
        return out;
      }
    } catch (const SolveError& err) {
      rep.failure = err.what();
      return out;
    }
    rnorm = r.lpNorm<Eigen::Infinity>();
    rep.residual_history.push_back(rnorm);
    ++rep.iterations;
  }

  // Independent recheck of the accepted state.
  rep.converged = residual(out.dofs).lpNorm<Eigen::Infinity>() < config.tol;
  if (!rep.converged) rep.failure = "converged state failed recheck";
  return out;
}

}  // namespace dve
