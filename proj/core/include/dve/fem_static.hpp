#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <utility>
#include <vector>

#include "dve/dtp.hpp"
#include "dve/mesh.hpp"
#include "dve/piecewise.hpp"

namespace dve {

/// Boundary/loading data of a 1-d elastostatics case: bulk-load slope alpha,
/// right-end displacement datum alpha_star, and whether the bulk term
/// (u - alpha x) participates at all.
struct CaseBC {
  double alpha = 0.0;
  double alpha_star = 0.0;
  bool include_bulk_term = true;
};

/// Base state (u_bar, e_bar) entering the auxiliary potential. e_bar is the
/// derivative of u_bar whenever both come from the same profile.
struct BaseState {
  PiecewisePoly u_bar;
  PiecewisePoly e_bar;

  static BaseState from_u(PiecewisePoly u) {
    BaseState b;
    b.e_bar = u.derivative_poly();
    b.u_bar = std::move(u);
    return b;
  }
};

/// Max |e_bar - u_bar'| over the mesh quadrature points.
double base_state_mismatch(const BaseState& base, const Mesh1D& mesh);

/// Free-dof layout: all lambda nodes first, then interior mu nodes. The mu
/// end nodes carry the homogeneous Dirichlet conditions mu(0) = mu(1) = 0 and
/// are eliminated from the system.
struct DofMap {
  int n_nodes = 0;

  int n_free() const { return 2 * n_nodes - 2; }
  int lambda_index(int node) const { return node; }
  int mu_index(int node) const {
    return (node >= 1 && node <= n_nodes - 2) ? n_nodes + node - 1 : -1;
  }
};

/// Primal fields recovered through the DtP mapping at quadrature points.
/// weight holds the global quadrature weight of each point.
struct QpField {
  std::vector<double> x;
  std::vector<double> weight;
  std::vector<double> u;
  std::vector<double> e;
  std::vector<int> element;
};

/// Dual problem for 1-d elastostatics: residual and Jacobian of the discrete
/// dual weak form over the free dofs, with the DtP mapping evaluated at each
/// quadrature point.
class StaticDualProblem {
 public:
  StaticDualProblem(Mesh1D mesh, BaseState base, CaseBC bc, AuxParams aux,
                    DtpOptions dtp_options = {});

  const Mesh1D& mesh() const { return mesh_; }
  const DofMap& dofs() const { return dof_map_; }
  const CaseBC& bc() const { return bc_; }
  const AuxParams& aux() const { return aux_; }
  int n_free() const { return dof_map_.n_free(); }

  Eigen::VectorXd assemble_residual(const Eigen::VectorXd& free_dofs) const;
  Eigen::SparseMatrix<double> assemble_jacobian(
      const Eigen::VectorXd& free_dofs) const;

  QpField recover_primal(const Eigen::VectorXd& free_dofs) const;

  /// Nodal (lambda, mu) fields with constrained entries filled in as zeros.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> nodal_duals(
      const Eigen::VectorXd& free_dofs) const;

  /// Largest |mapping residual| over all quadrature points; used to verify a
  /// solved state against the DtP equations.
  double max_mapping_residual(const Eigen::VectorXd& free_dofs) const;

 private:
  struct PointState {
    double x = 0.0;
    PointBase base;
    StaticPointDual dual;
    PointPrimal primal;
  };
  template <class Visit>
  void for_each_qp(const Eigen::VectorXd& free_dofs, Visit&& visit) const;

  Mesh1D mesh_;
  BaseState base_;
  CaseBC bc_;
  AuxParams aux_;
  DtpOptions dtp_options_;
  DofMap dof_map_;
};

/// L2 projection of quadrature-point data onto the nodal linear FE space
/// (consistent mass matrix). Throws SingularMatrixError for degenerate
/// meshes.
Eigen::VectorXd l2_project(const QpField& data, const Mesh1D& mesh);

/// As above for a second field sharing the same points.
Eigen::VectorXd l2_project(const std::vector<double>& values,
                           const QpField& points, const Mesh1D& mesh);

/// integral of |f| over [0, 1] by per-element quadrature of |f|.
double l1_norm(const QpField& data);
double l1_norm_nodal(const std::vector<double>& nodal_values,
                     const Mesh1D& mesh);
double l1_norm(const std::function<double(double)>& f, const Mesh1D& mesh,
               int quad_points = 5);

/// Piecewise-linear interpolant evaluation for a nodal field.
double eval_nodal(const std::vector<double>& nodal_values, const Mesh1D& mesh,
                  double x);

}  // namespace dve
