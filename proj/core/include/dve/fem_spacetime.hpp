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

/// Data of a 1-d elastodynamic initial/boundary value problem on
/// [0,1] x [0,T]: initial strain and velocity, velocity boundary data.
struct DynamicCase {
  PiecewisePoly e0;
  PiecewisePoly v0;
  std::function<double(double)> v_left = [](double) { return 0.0; };
  std::function<double(double)> v_right = [](double) { return 0.0; };
  double t_final = 1.0;
};

/// Space-time base state (v_bar, e_bar) for the auxiliary potential.
struct SpaceTimeBase {
  std::function<double(double, double)> v_bar;
  std::function<double(double, double)> e_bar;

  /// Base state constant in time, built from spatial profiles.
  static SpaceTimeBase time_constant(PiecewisePoly v, PiecewisePoly e);
};

/// Primal fields recovered at the space-time quadrature points.
struct StQpField {
  std::vector<double> x, t, weight, v, e;
  std::vector<int> cell_i, cell_j;
};

/// Dual problem for 1-d elastodynamics posed monolithically on the space-time
/// block. Dual fields (L, P) are bilinear on the grid. Where a boundary
/// segment carries no primal datum for a primal variable, the paired dual
/// variable gets a homogeneous Dirichlet condition: L vanishes on the lateral
/// edges and at t = T, P vanishes at t = T; everything is free at t = 0 where
/// the initial data enter through boundary integrals of the action.
class DynamicDualProblem {
 public:
  DynamicDualProblem(SpaceTimeMesh mesh, SpaceTimeBase base, DynamicCase data,
                     AuxParams aux, DtpOptions dtp_options = {});

  const SpaceTimeMesh& mesh() const { return mesh_; }
  const DynamicCase& data() const { return data_; }
  const AuxParams& aux() const { return aux_; }
  int n_free() const { return n_free_; }

  /// Free index of the L dof at a node, -1 when constrained.
  int l_index(int node) const { return l_index_[node]; }
  int p_index(int node) const { return p_index_[node]; }

  Eigen::VectorXd assemble_residual(const Eigen::VectorXd& free_dofs) const;
  Eigen::SparseMatrix<double> assemble_jacobian(
      const Eigen::VectorXd& free_dofs) const;

  StQpField recover_primal(const Eigen::VectorXd& free_dofs) const;

  /// Nodal (L, P) fields with constrained entries as zeros.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> nodal_duals(
      const Eigen::VectorXd& free_dofs) const;

  double max_mapping_residual(const Eigen::VectorXd& free_dofs) const;

 private:
  struct PointState {
    double x = 0.0, t = 0.0;
    PointBase base;
    DynamicPointDual dual;
    PointPrimal primal;
  };
  template <class Visit>
  void for_each_qp(const Eigen::VectorXd& free_dofs, Visit&& visit) const;

  SpaceTimeMesh mesh_;
  SpaceTimeBase base_;
  DynamicCase data_;
  AuxParams aux_;
  DtpOptions dtp_options_;
  std::vector<int> l_index_, p_index_;
  int n_free_ = 0;
};

/// L2 projection of space-time quadrature data onto the bilinear nodal space.
Eigen::VectorXd st_l2_project(const std::vector<double>& values,
                              const StQpField& points,
                              const SpaceTimeMesh& mesh);

}  // namespace dve
