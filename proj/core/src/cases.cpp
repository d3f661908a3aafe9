#include "dve/cases.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dve/errors.hpp"
#include "dve/material.hpp"

namespace dve {
namespace {

// Compactly supported displacement bump a (1 - t^2)^2, t = (x - c) / w.
PiecewisePoly displacement_bump(double amplitude, double center,
                                double halfwidth) {
  const double lo = center - halfwidth, hi = center + halfwidth;
  if (lo <= 0.0 || hi >= 1.0) {
    throw std::invalid_argument("displacement_bump: support must lie in (0,1)");
  }
  const std::vector<double> in_t = {amplitude, 0.0, -2.0 * amplitude, 0.0,
                                    amplitude};
  // Local segment variable s = x - lo, so t = s / w - 1.
  std::vector<double> seg =
      PiecewisePoly::affine_substitution(in_t, 1.0 / halfwidth, -1.0);
  return PiecewisePoly({0.0, lo, hi, 1.0}, {{0.0}, std::move(seg), {0.0}});
}

CaseSpec statics_skeleton(const std::string& name, const CaseOptions& opt) {
  CaseSpec spec;
  spec.name = name;
  spec.aux = opt.aux;
  return spec;
}

double parse_hat_amplitude(const std::string& name, const CaseOptions& opt) {
  const auto colon = name.find(':');
  if (colon == std::string::npos) return opt.hat_a;
  const std::string arg = name.substr(colon + 1);
  try {
    std::size_t used = 0;
    const double a = std::stod(arg, &used);
    if (used != arg.size()) throw std::invalid_argument(arg);
    return a;
  } catch (const std::exception&) {
    throw UnknownCaseError("bad case parameter '" + arg + "' in '" + name +
                           "'");
  }
}

}  // namespace

PiecewisePoly grain_strain_profile() {
  // Three strain levels with identical stress 0.768: the middle sits on the
  // unstable branch, the outer two on the stable wells' branches.
  const double r = std::sqrt(0.97);
  const double e_soft = 1.1 - r;   // ~0.11511
  const double e_large = 1.1 + r;  // ~2.08489
  return PiecewisePoly::step({0.0, 0.3225, 0.3325, 0.8275, 0.8875, 1.0},
                             {e_soft, 0.8, e_large, 0.8, e_soft});
}

BaseState staircase_profile(double x0, int n_steps) {
  if (!(x0 > 0.0 && x0 < 1.0)) {
    throw std::invalid_argument("staircase_profile: need 0 < x0 < 1");
  }
  if (n_steps < 0) {
    throw std::invalid_argument("staircase_profile: need n_steps >= 0");
  }
  const double tail_slope = (1.0 - 0.5 * x0) / (1.0 - x0);
  if (std::abs(tail_slope - 2.0) > 1e-12) {
    std::ostringstream msg;
    msg << "staircase_profile: slope past x0 would be " << tail_slope
        << ", admissible slopes are {0, 2}; only x0 = 2/3 closes the profile";
    throw InfeasibleProfileError(msg.str());
  }

  std::vector<double> xs = {0.0}, ys = {0.0};
  if (n_steps == 0) {
    xs.push_back(x0);
    ys.push_back(0.5 * x0);
  } else {
    // Each period rides the mean slope 1/2: flat over 3/4 of it, slope 2
    // over the remaining 1/4.
    const double period = x0 / n_steps;
    for (int k = 0; k < n_steps; ++k) {
      const double start = k * period;
      xs.push_back(start + 0.75 * period);
      ys.push_back(ys.back());
      xs.push_back(start + period);
      ys.push_back(ys.back() + 0.5 * period);
    }
    xs.back() = x0;  // guard against accumulation drift
  }
  xs.push_back(1.0);
  ys.push_back(1.0);
  return BaseState::from_u(PiecewisePoly::linear_interpolant(xs, ys));
}

std::vector<std::string> case_names() {
  return {"stress_free",           "stressed_homogeneous",
          "stressed_inhomogeneous", "hat_bifurcation",
          "grain_boundary_static",  "grain_boundary_dynamic",
          "perturbed_dynamic"};
}

CaseSpec build_case(const std::string& name, const CaseOptions& opt) {
  const std::string head = name.substr(0, name.find(':'));

  if (head == "stress_free") {
    CaseSpec spec = statics_skeleton(head, opt);
    spec.bc = {1.0, 1.0, true};
    spec.base = BaseState::from_u(PiecewisePoly::polynomial({0.0, 1.3, -0.3}));
    spec.has_target = true;
    spec.u_target = PiecewisePoly::polynomial({0.0, 1.0});
    spec.e_target = PiecewisePoly::constant(1.0);
    spec.refinement = {100, 1600, 8000};
    return spec;
  }
  if (head == "stressed_homogeneous") {
    CaseSpec spec = statics_skeleton(head, opt);
    spec.bc = {0.5, 0.5, true};
    // Curved strain profile with the solution's average; profiles reaching
    // past the spinodal edge push the first Newton iterate over the
    // mapping fold.
    spec.base = BaseState::from_u(
        PiecewisePoly::polynomial({0.0, 0.44, 0.18, -0.12}));
    spec.has_target = true;
    spec.u_target = PiecewisePoly::polynomial({0.0, 0.5});
    spec.e_target = PiecewisePoly::constant(0.5);
    spec.refinement = {100, 1600, 8000};
    return spec;
  }
  if (head == "stressed_inhomogeneous") {
    CaseSpec spec = statics_skeleton(head, opt);
    spec.bc = {0.5, 1.0, true};
    // Uniform strain 20% above the solution's average; the solved strain
    // profile decreases from ~1.044 to ~0.913 across the bar.
    spec.base = (opt.staircase_steps >= 0)
                    ? staircase_profile(2.0 / 3.0, opt.staircase_steps)
                    : BaseState::from_u(PiecewisePoly::polynomial({0.0, 1.2}));
    spec.refinement = {100, 2000, 4000};
    spec.reference_elements = 8000;
    return spec;
  }
  if (head == "hat_bifurcation") {
    const double a = parse_hat_amplitude(name, opt);
    CaseSpec spec = statics_skeleton(head, opt);
    spec.name = name;
    spec.bc = {0.0, 1.0, false};
    spec.base = BaseState::from_u(PiecewisePoly(
        {0.0, 0.5, 1.0},
        {{0.0, 1.0 - a}, {0.5 * (1.0 - a), 1.0 + a}}));
    spec.refinement = {100, 2000, 4000};
    spec.reference_elements = 8000;
    spec.default_elements = 512;
    return spec;
  }
  if (head == "grain_boundary_static") {
    CaseSpec spec = statics_skeleton(head, opt);
    const PiecewisePoly strain = grain_strain_profile();
    spec.bc = {0.0, 1.138, false};
    BaseState base;
    base.e_bar = strain;
    base.u_bar = strain.antiderivative(0.0);
    spec.base = base;
    spec.has_target = true;
    spec.e_target = strain;
    spec.u_target = spec.base.u_bar;
    spec.refinement = {100, 1600, 8000};
    spec.default_elements = 1600;
    return spec;
  }
  if (head == "grain_boundary_dynamic" || head == "perturbed_dynamic") {
    CaseSpec spec = statics_skeleton(head, opt);
    spec.dynamic = true;
    const PiecewisePoly equilibrium = grain_strain_profile();
    spec.e_reference = equilibrium;
    spec.dyn.v0 = PiecewisePoly::constant(0.0);
    spec.dyn.t_final = opt.t_final > 0.0
                           ? opt.t_final
                           : (head == "perturbed_dynamic" ? 0.25 : 1.0);
    spec.st_base = SpaceTimeBase::time_constant(PiecewisePoly::constant(0.0),
                                                equilibrium);
    if (head == "perturbed_dynamic") {
      // Displacement bumps confined to the two stable phases, narrow
      // enough that the split packets separate before reaching the
      // nearest grain boundary.
      const PiecewisePoly bump = PiecewisePoly::sum(
          displacement_bump(opt.perturb_amplitude, 0.16, 0.05),
          displacement_bump(opt.perturb_amplitude, 0.58, 0.07));
      spec.dyn.e0 =
          PiecewisePoly::sum(equilibrium, bump.derivative_poly());
    } else {
      spec.dyn.e0 = equilibrium;
    }
    return spec;
  }
  std::string known;
  for (const auto& n : case_names()) {
    if (!known.empty()) known += ", ";
    known += n;
  }
  throw UnknownCaseError("unknown case '" + name + "'; known cases: " + known);
}

StaticRunReport run_static_case(const CaseSpec& spec, int n_elements,
                                const NewtonConfig& newton) {
  const Mesh1D mesh = Mesh1D::uniform(n_elements);
  const StaticDualProblem problem(mesh, spec.base, spec.bc, spec.aux);
  NewtonResult solved = newton_solve(
      [&](const Eigen::VectorXd& d) { return problem.assemble_residual(d); },
      [&](const Eigen::VectorXd& d) { return problem.assemble_jacobian(d); },
      Eigen::VectorXd::Zero(problem.n_free()), newton);
  if (!solved.report.converged) {
    std::ostringstream msg;
    msg << "case " << spec.name << " (" << n_elements
        << " elements) did not converge: " << solved.report.failure;
    throw SolveError(msg.str());
  }

  StaticRunReport rep;
  rep.case_name = spec.name;
  rep.n_elements = n_elements;
  rep.aux = spec.aux;
  rep.newton = solved.report;
  rep.qp = problem.recover_primal(solved.dofs);
  rep.max_mapping_residual = problem.max_mapping_residual(solved.dofs);
  rep.node_x = mesh.nodes();
  const Eigen::VectorXd u_n = l2_project(rep.qp.u, rep.qp, mesh);
  const Eigen::VectorXd e_n = l2_project(rep.qp.e, rep.qp, mesh);
  rep.u_hat.assign(u_n.data(), u_n.data() + u_n.size());
  rep.e_hat.assign(e_n.data(), e_n.data() + e_n.size());
  if (spec.has_target) {
    // The projected nodal fields establish the solution; their distance to
    // the target is the reported accuracy. Against discontinuous targets
    // the projection smooths each jump over O(h), which bounds how small
    // this metric can get on coarse meshes.
    rep.err_u = l1_error_vs_poly(rep.u_hat, mesh, spec.u_target);
    rep.err_e = l1_error_vs_poly(rep.e_hat, mesh, spec.e_target);
  }
  return rep;
}

std::vector<RefinementRow> refinement_study(const CaseSpec& spec,
                                            const std::vector<int>& meshes,
                                            const NewtonConfig& newton) {
  std::vector<RefinementRow> rows;
  if (spec.has_target) {
    for (int ne : meshes) {
      const StaticRunReport rep = run_static_case(spec, ne, newton);
      rows.push_back({ne, rep.err_u, rep.err_e});
    }
    return rows;
  }
  const int ref = spec.reference_elements > 0 ? spec.reference_elements : 8000;
  const StaticRunReport reference = run_static_case(spec, ref, newton);
  const Mesh1D ref_mesh = Mesh1D::uniform(ref);
  for (int ne : meshes) {
    const StaticRunReport rep = run_static_case(spec, ne, newton);
    const Mesh1D mesh = Mesh1D::uniform(ne);
    rows.push_back({ne,
                    l1_error_between(rep.u_hat, mesh, reference.u_hat,
                                     ref_mesh),
                    l1_error_between(rep.e_hat, mesh, reference.e_hat,
                                     ref_mesh)});
  }
  return rows;
}

DynamicRunReport run_dynamic_case(const CaseSpec& spec, int nx, int nt,
                                  const NewtonConfig& newton) {
  const SpaceTimeMesh mesh = SpaceTimeMesh::uniform(nx, nt, spec.dyn.t_final);
  const DynamicDualProblem problem(mesh, spec.st_base, spec.dyn, spec.aux);
  NewtonResult solved = newton_solve(
      [&](const Eigen::VectorXd& d) { return problem.assemble_residual(d); },
      [&](const Eigen::VectorXd& d) { return problem.assemble_jacobian(d); },
      Eigen::VectorXd::Zero(problem.n_free()), newton);
  if (!solved.report.converged) {
    std::ostringstream msg;
    msg << "case " << spec.name << " (" << nx << "x" << nt
        << " space-time grid) did not converge: " << solved.report.failure;
    throw SolveError(msg.str());
  }

  DynamicRunReport rep;
  rep.case_name = spec.name;
  rep.nx = nx;
  rep.nt = nt;
  rep.t_final = spec.dyn.t_final;
  rep.aux = spec.aux;
  rep.newton = solved.report;
  rep.qp = problem.recover_primal(solved.dofs);
  rep.max_mapping_residual = problem.max_mapping_residual(solved.dofs);
  rep.x_nodes = mesh.x_nodes();
  rep.t_nodes = mesh.t_nodes();
  const Eigen::VectorXd v_n = st_l2_project(rep.qp.v, rep.qp, mesh);
  const Eigen::VectorXd e_n = st_l2_project(rep.qp.e, rep.qp, mesh);
  rep.v_nodal.assign(v_n.data(), v_n.data() + v_n.size());
  rep.e_nodal.assign(e_n.data(), e_n.data() + e_n.size());

  // Displacement for reporting: u(0, t) from the left velocity datum, then
  // the trapezoid rule on the projected strain along x.
  rep.u_nodal.assign(rep.e_nodal.size(), 0.0);
  double u_left = 0.0;
  for (int j = 0; j <= nt; ++j) {
    if (j > 0) {
      const double dt = rep.t_nodes[j] - rep.t_nodes[j - 1];
      u_left += 0.5 * dt *
                (spec.dyn.v_left(rep.t_nodes[j - 1]) +
                 spec.dyn.v_left(rep.t_nodes[j]));
    }
    rep.u_nodal[mesh.node_id(0, j)] = u_left;
    for (int i = 1; i <= nx; ++i) {
      const double dx = rep.x_nodes[i] - rep.x_nodes[i - 1];
      rep.u_nodal[mesh.node_id(i, j)] =
          rep.u_nodal[mesh.node_id(i - 1, j)] +
          0.5 * dx *
              (rep.e_nodal[mesh.node_id(i - 1, j)] +
               rep.e_nodal[mesh.node_id(i, j)]);
    }
  }

  const PiecewisePoly& ref =
      spec.e_reference.empty() ? spec.dyn.e0 : spec.e_reference;
  double metric = 0.0;
  for (std::size_t k = 0; k < rep.qp.e.size(); ++k) {
    metric = std::max(metric, std::abs(rep.qp.e[k] - ref(rep.qp.x[k])));
  }
  rep.stability_metric = metric;
  return rep;
}

double l1_error_vs_poly(const std::vector<double>& nodal, const Mesh1D& mesh,
                        const PiecewisePoly& reference, int quad_points) {
  const QuadRule q = QuadRule::gauss(quad_points);
  const auto& breaks = reference.breakpoints();
  double sum = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double xl = mesh.element_left(e);
    const double xr = xl + mesh.element_size(e);
    // Split the element at interior reference breakpoints.
    std::vector<double> cuts = {xl};
    for (double b : breaks) {
      if (b > xl && b < xr) cuts.push_back(b);
    }
    cuts.push_back(xr);
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double h = cuts[c + 1] - cuts[c];
      for (int k = 0; k < q.size(); ++k) {
        const double x = cuts[c] + 0.5 * h * (1.0 + q.points[k]);
        const double v = eval_nodal(nodal, mesh, x) - reference(x);
        sum += q.weights[k] * 0.5 * h * std::abs(v);
      }
    }
  }
  return sum;
}

double l1_error_qp(const std::vector<double>& values, const QpField& points,
                   const PiecewisePoly& reference) {
  if (values.size() != points.x.size()) {
    throw std::invalid_argument("l1_error_qp: field/point size mismatch");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    sum += points.weight[k] * std::abs(values[k] - reference(points.x[k]));
  }
  return sum;
}

double l1_error_between(const std::vector<double>& coarse,
                        const Mesh1D& coarse_mesh,
                        const std::vector<double>& fine,
                        const Mesh1D& fine_mesh, int quad_points) {
  const QuadRule q = QuadRule::gauss(quad_points);
  double sum = 0.0;
  for (int e = 0; e < fine_mesh.n_elements(); ++e) {
    const double xl = fine_mesh.element_left(e);
    const double h = fine_mesh.element_size(e);
    for (int k = 0; k < q.size(); ++k) {
      const double x = xl + 0.5 * h * (1.0 + q.points[k]);
      const double v =
          eval_nodal(coarse, coarse_mesh, x) - eval_nodal(fine, fine_mesh, x);
      sum += q.weights[k] * 0.5 * h * std::abs(v);
    }
  }
  return sum;
}

}  // namespace dve
