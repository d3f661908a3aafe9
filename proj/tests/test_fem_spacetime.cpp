#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "dve/cases.hpp"
#include "dve/fem_spacetime.hpp"
#include "dve/newton.hpp"
#include "dve/rng.hpp"

using namespace dve;

namespace {

Eigen::MatrixXd dense(const Eigen::SparseMatrix<double>& m) {
  return Eigen::MatrixXd(m);
}

DynamicDualProblem make_problem(const CaseSpec& spec, int nx, int nt) {
  return DynamicDualProblem(
      SpaceTimeMesh::uniform(nx, nt, spec.dyn.t_final), spec.st_base,
      spec.dyn, spec.aux);
}

}  // namespace

TEST_CASE("dual boundary conditions constrain the right nodes") {
  const CaseSpec spec = build_case("grain_boundary_dynamic");
  const int nx = 6, nt = 4;
  const DynamicDualProblem problem = make_problem(spec, nx, nt);
  const SpaceTimeMesh& mesh = problem.mesh();

  // t = T edge: both fields constrained.
  for (int i = 0; i <= nx; ++i) {
    CHECK(problem.l_index(mesh.node_id(i, nt)) == -1);
    CHECK(problem.p_index(mesh.node_id(i, nt)) == -1);
  }
  // t = 0 edge: interior L and all P free.
  for (int i = 1; i < nx; ++i) {
    CHECK(problem.l_index(mesh.node_id(i, 0)) >= 0);
  }
  for (int i = 0; i <= nx; ++i) {
    CHECK(problem.p_index(mesh.node_id(i, 0)) >= 0);
  }
  // Lateral edges: L pinned (no traction datum), P free (velocity datum).
  for (int j = 0; j < nt; ++j) {
    CHECK(problem.l_index(mesh.node_id(0, j)) == -1);
    CHECK(problem.l_index(mesh.node_id(nx, j)) == -1);
    CHECK(problem.p_index(mesh.node_id(0, j)) >= 0);
    CHECK(problem.p_index(mesh.node_id(nx, j)) >= 0);
  }
  CHECK(problem.n_free() == (nx - 1) * nt + (nx + 1) * nt);
}

TEST_CASE("equilibrium initial data give a zero residual at zero dual state") {
  SUBCASE("grain-boundary equilibrium") {
    const CaseSpec spec = build_case("grain_boundary_dynamic");
    const DynamicDualProblem problem = make_problem(spec, 16, 12);
    const Eigen::VectorXd r =
        problem.assemble_residual(Eigen::VectorXd::Zero(problem.n_free()));
    CHECK(r.lpNorm<Eigen::Infinity>() < 1e-10);
  }
  SUBCASE("homogeneous equilibrium") {
    CaseSpec spec = build_case("grain_boundary_dynamic");
    spec.dyn.e0 = PiecewisePoly::constant(0.5);
    spec.st_base = SpaceTimeBase::time_constant(PiecewisePoly::constant(0.0),
                                                PiecewisePoly::constant(0.5));
    const DynamicDualProblem problem = make_problem(spec, 8, 8);
    const Eigen::VectorXd r =
        problem.assemble_residual(Eigen::VectorXd::Zero(problem.n_free()));
    CHECK(r.lpNorm<Eigen::Infinity>() < 1e-10);
  }
}

TEST_CASE("space-time jacobian is symmetric and negative semidefinite") {
  Rng rng(71);
  for (int trial = 0; trial < 4; ++trial) {
    CaseSpec spec = build_case("grain_boundary_dynamic");
    spec.aux.c_v = 20.0 + 200.0 * rng.uniform();
    spec.aux.c_e = 20.0 + 200.0 * rng.uniform();
    spec.aux.rho0 = 0.5 + rng.uniform();
    // Random smooth spatial base, constant in time.
    const double a0 = 1.0 + 0.5 * rng.normal();
    const double a1 = 0.5 * rng.normal();
    spec.st_base = SpaceTimeBase::time_constant(
        PiecewisePoly::polynomial({0.2 * rng.normal()}),
        PiecewisePoly::polynomial({a0, a1}));
    const DynamicDualProblem problem = make_problem(spec, 8, 8);
    const Eigen::MatrixXd J = dense(
        problem.assemble_jacobian(Eigen::VectorXd::Zero(problem.n_free())));
    const double scale = J.norm();
    CHECK((J - J.transpose()).norm() < 1e-10 * scale);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        0.5 * (J + J.transpose()));
    CHECK(eig.eigenvalues().maxCoeff() <= 1e-8 * scale);
  }
}

TEST_CASE("space-time jacobian matches finite differences") {
  Rng rng(73);
  const CaseSpec spec = build_case("grain_boundary_dynamic");
  const DynamicDualProblem problem = make_problem(spec, 4, 4);
  Eigen::VectorXd x(problem.n_free());
  for (int i = 0; i < x.size(); ++i) x[i] = 0.3 * rng.normal();
  const Eigen::MatrixXd J = dense(problem.assemble_jacobian(x));
  const double h = 1e-6;
  for (int col = 0; col < x.size(); ++col) {
    Eigen::VectorXd xp = x, xm = x;
    xp[col] += h;
    xm[col] -= h;
    const Eigen::VectorXd fd =
        (problem.assemble_residual(xp) - problem.assemble_residual(xm)) /
        (2.0 * h);
    for (int row = 0; row < x.size(); ++row) {
      const double denom = std::max(1e-4, std::abs(J(row, col)));
      CHECK(std::abs(fd[row] - J(row, col)) / denom < 1e-5);
    }
  }
}

TEST_CASE("perturbed initial data converge and satisfy the mapping") {
  const CaseSpec spec = build_case("perturbed_dynamic");
  const DynamicDualProblem problem = make_problem(spec, 24, 16);
  const NewtonResult res = newton_solve(
      [&](const Eigen::VectorXd& d) { return problem.assemble_residual(d); },
      [&](const Eigen::VectorXd& d) { return problem.assemble_jacobian(d); },
      Eigen::VectorXd::Zero(problem.n_free()));
  REQUIRE(res.report.converged);
  CHECK(problem.max_mapping_residual(res.dofs) <=
        1e-12 * std::max(1.0, spec.aux.c_e));
  // The perturbation leaves a nonzero dual state behind.
  CHECK(res.dofs.lpNorm<Eigen::Infinity>() > 1e-8);
}

TEST_CASE("space-time l2 projection reproduces bilinear data") {
  const CaseSpec spec = build_case("grain_boundary_dynamic");
  const DynamicDualProblem problem = make_problem(spec, 6, 5);
  const SpaceTimeMesh& mesh = problem.mesh();
  const StQpField pts =
      problem.recover_primal(Eigen::VectorXd::Zero(problem.n_free()));
  std::vector<double> vals;
  for (std::size_t k = 0; k < pts.x.size(); ++k) {
    vals.push_back(1.5 * pts.x[k] - 0.25 * pts.t[k] + 0.75);
  }
  const Eigen::VectorXd nodal = st_l2_project(vals, pts, mesh);
  for (int j = 0; j <= mesh.nt(); ++j) {
    for (int i = 0; i <= mesh.nx(); ++i) {
      const double expect =
          1.5 * mesh.x_nodes()[i] - 0.25 * mesh.t_nodes()[j] + 0.75;
      CHECK(nodal[mesh.node_id(i, j)] ==
            doctest::Approx(expect).epsilon(1e-10));
    }
  }
}
