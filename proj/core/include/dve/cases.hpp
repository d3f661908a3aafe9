#pragma once

#include <limits>
#include <string>
#include <vector>

#include "dve/fem_spacetime.hpp"
#include "dve/fem_static.hpp"
#include "dve/newton.hpp"

namespace dve {

/// Options shared by the case builders. Values the underlying problem
/// descriptions leave open (hat amplitude, dynamics window, perturbation
/// size) default here.
struct CaseOptions {
  double hat_a = 1.0;
  int staircase_steps = -1;  // >= 0 selects a staircase base profile
  double t_final = -1.0;     // < 0 keeps the case default
  double perturb_amplitude = 5e-4;
  AuxParams aux;
};

/// Declarative description of one computed case.
struct CaseSpec {
  std::string name;
  bool dynamic = false;
  AuxParams aux;

  // Statics.
  CaseBC bc;
  BaseState base;
  bool has_target = false;
  PiecewisePoly u_target;
  PiecewisePoly e_target;
  std::vector<int> refinement;  // mesh ladder for the error tables
  int reference_elements = 0;   // > 0: self-convergence reference mesh
  int default_elements = 100;

  // Dynamics.
  DynamicCase dyn;
  SpaceTimeBase st_base;
  PiecewisePoly e_reference;  // equilibrium profile for the stability metric
  int default_nx = 64;
  int default_nt = 64;
};

/// Known case names: stress_free, stressed_homogeneous,
/// stressed_inhomogeneous, hat_bifurcation (amplitude from options or a
/// "hat_bifurcation:<a>" suffix), grain_boundary_static,
/// grain_boundary_dynamic, perturbed_dynamic.
/// Throws UnknownCaseError otherwise.
CaseSpec build_case(const std::string& name, const CaseOptions& options = {});

std::vector<std::string> case_names();

/// Continuous displacement profile of slope 1/2 up to x0 carrying a
/// staircase of slopes {0, 2} with n_steps risers, then a single admissible
/// slope to reach u(1) = 1. Only x0 = 2/3 makes that final slope equal 2;
/// anything else throws InfeasibleProfileError.
BaseState staircase_profile(double x0, int n_steps);

/// Uniform-stress grain profile: strains 1.1 - sqrt(0.97), 0.8,
/// 1.1 + sqrt(0.97) (all at stress 0.768) on the breakpoints
/// {0.3225, 0.3325, 0.8275, 0.8875}.
PiecewisePoly grain_strain_profile();

struct StaticRunReport {
  std::string case_name;
  int n_elements = 0;
  AuxParams aux;
  NewtonReport newton;
  std::vector<double> node_x;
  std::vector<double> u_hat;
  std::vector<double> e_hat;
  QpField qp;
  double err_u = std::numeric_limits<double>::quiet_NaN();
  double err_e = std::numeric_limits<double>::quiet_NaN();
  double max_mapping_residual = 0.0;
};

/// Solve a static case from the zero dual guess, project the recovered
/// fields, and measure L1 errors against the closed-form target when one
/// exists. Throws SolveError when Newton fails.
StaticRunReport run_static_case(const CaseSpec& spec, int n_elements,
                                const NewtonConfig& newton = {});

struct RefinementRow {
  int n_elements = 0;
  double err_u = 0.0;
  double err_e = 0.0;
};

/// Error table over the case's mesh ladder: errors against the target when
/// available, otherwise against the solution on reference_elements.
std::vector<RefinementRow> refinement_study(const CaseSpec& spec,
                                            const std::vector<int>& meshes,
                                            const NewtonConfig& newton = {});

struct DynamicRunReport {
  std::string case_name;
  int nx = 0;
  int nt = 0;
  double t_final = 0.0;
  AuxParams aux;
  NewtonReport newton;
  std::vector<double> x_nodes;
  std::vector<double> t_nodes;
  std::vector<double> v_nodal;  // space-time L2 projections, node-ordered
  std::vector<double> e_nodal;
  std::vector<double> u_nodal;  // strain integrated in x per time level
  StQpField qp;
  double stability_metric = 0.0;  // max |e - e_reference| over the window
  double max_mapping_residual = 0.0;
};

/// Solve a dynamic case monolithically on the space-time block.
DynamicRunReport run_dynamic_case(const CaseSpec& spec, int nx, int nt,
                                  const NewtonConfig& newton = {});

/// L1 distance between a nodal field and a reference curve, integrating
/// each element split at the reference's breakpoints.
double l1_error_vs_poly(const std::vector<double>& nodal, const Mesh1D& mesh,
                        const PiecewisePoly& reference, int quad_points = 5);

/// L1 distance between a quadrature-point field and a reference curve.
/// Keeps discontinuous DtP recoveries comparable against discontinuous
/// targets without projection smoothing.
double l1_error_qp(const std::vector<double>& values, const QpField& points,
                   const PiecewisePoly& reference);

/// L1 distance between nodal fields on nested meshes.
double l1_error_between(const std::vector<double>& coarse,
                        const Mesh1D& coarse_mesh,
                        const std::vector<double>& fine,
                        const Mesh1D& fine_mesh, int quad_points = 5);

}  // namespace dve
