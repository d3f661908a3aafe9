#include "dve/fem_static.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dve/errors.hpp"
#include "dve/material.hpp"

namespace dve {

double base_state_mismatch(const BaseState& base, const Mesh1D& mesh) {
  double worst = 0.0;
  const QuadRule& q = mesh.quad();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double xl = mesh.element_left(e);
    const double h = mesh.element_size(e);
    for (int k = 0; k < q.size(); ++k) {
      const double x = xl + 0.5 * h * (1.0 + q.points[k]);
      worst = std::max(worst,
                       std::abs(base.e_bar(x) - base.u_bar.derivative(x)));
    }
  }
  return worst;
}

StaticDualProblem::StaticDualProblem(Mesh1D mesh, BaseState base, CaseBC bc,
                                     AuxParams aux, DtpOptions dtp_options)
    : mesh_(std::move(mesh)),
      base_(std::move(base)),
      bc_(bc),
      aux_(aux),
      dtp_options_(dtp_options) {
  dof_map_.n_nodes = mesh_.n_nodes();
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> StaticDualProblem::nodal_duals(
    const Eigen::VectorXd& free_dofs) const {
  const int n = mesh_.n_nodes();
  Eigen::VectorXd lambda(n), mu(n);
  mu.setZero();
  for (int i = 0; i < n; ++i) lambda[i] = free_dofs[dof_map_.lambda_index(i)];
  for (int i = 1; i <= n - 2; ++i) mu[i] = free_dofs[dof_map_.mu_index(i)];
  return {lambda, mu};
}

template <class Visit>
void StaticDualProblem::for_each_qp(const Eigen::VectorXd& free_dofs,
                                    Visit&& visit) const {
  const auto [lambda, mu] = nodal_duals(free_dofs);
  const QuadRule& q = mesh_.quad();
  for (int e = 0; e < mesh_.n_elements(); ++e) {
    const double xl = mesh_.element_left(e);
    const double h = mesh_.element_size(e);
    const double lam_l = lambda[e], lam_r = lambda[e + 1];
    const double mu_l = mu[e], mu_r = mu[e + 1];
    for (int k = 0; k < q.size(); ++k) {
      const double xi = q.points[k];
      const double w = q.weights[k] * 0.5 * h;
      const double x = xl + 0.5 * h * (1.0 + xi);
      const double nl = 0.5 * (1.0 - xi), nr = 0.5 * (1.0 + xi);

      PointState s;
      s.x = x;
      s.base.u_bar = base_.u_bar(x);
      s.base.e_bar = base_.e_bar(x);
      s.dual.lambda = lam_l * nl + lam_r * nr;
      s.dual.lambda_x = (lam_r - lam_l) / h;
      // Without the bulk term the u-mapping has no mu contribution.
      s.dual.mu = bc_.include_bulk_term ? (mu_l * nl + mu_r * nr) : 0.0;
      s.dual.mu_x = (mu_r - mu_l) / h;
      try {
        s.primal = dtp_static(s.dual, s.base, aux_, dtp_options_);
      } catch (const DtpError& err) {
        std::ostringstream msg;
        msg << err.what() << " [element " << e << ", x = " << x << "]";
        throw DtpError(err.kind(), msg.str());
      }
      visit(e, k, w, nl, nr, h, s);
    }
  }
}

Eigen::VectorXd StaticDualProblem::assemble_residual(
    const Eigen::VectorXd& free_dofs) const {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n_free());
  for_each_qp(free_dofs, [&](int e, int, double w, double nl, double nr,
                             double h, const PointState& s) {
    const double dn[2] = {-1.0 / h, 1.0 / h};
    const double n[2] = {nl, nr};
    const double fl = flux(s.primal.e);
    for (int a = 0; a < 2; ++a) {
      const int node = e + a;
      r[dof_map_.lambda_index(node)] +=
          w * (-s.primal.u * dn[a] - s.primal.e * n[a]);
      const int mi = dof_map_.mu_index(node);
      if (mi >= 0) {
        double val = -fl * dn[a];
        if (bc_.include_bulk_term) {
          val -= (s.primal.u - bc_.alpha * s.x) * n[a];
        }
        r[mi] += w * val;
      }
    }
  });
  // Neumann datum from the right-end displacement boundary condition.
  r[dof_map_.lambda_index(mesh_.n_nodes() - 1)] += bc_.alpha_star;
  return r;
}

Eigen::SparseMatrix<double> StaticDualProblem::assemble_jacobian(
    const Eigen::VectorXd& free_dofs) const {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(mesh_.n_elements()) * 16);
  const bool bulk = bc_.include_bulk_term;
  for_each_qp(free_dofs, [&](int e, int, double w, double nl, double nr,
                             double h, const PointState& s) {
    const double dn[2] = {-1.0 / h, 1.0 / h};
    const double n[2] = {nl, nr};
    const StaticDtpDerivatives d =
        dtp_static_derivatives(s.dual, s.base, aux_, s.primal.e);
    const double fp = flux_derivative(s.primal.e);
    for (int a = 0; a < 2; ++a) {
      const int la = dof_map_.lambda_index(e + a);
      const int ma = dof_map_.mu_index(e + a);
      for (int b = 0; b < 2; ++b) {
        const int lb = dof_map_.lambda_index(e + b);
        const int mb = dof_map_.mu_index(e + b);
        // d R_lambda / d lambda
        trips.emplace_back(la, lb,
                           w * (-d.du_dlambda_x * dn[a] * dn[b] -
                                d.de_dlambda * n[a] * n[b]));
        // d R_lambda / d mu
        if (mb >= 0) {
          double val = -d.de_dmu_x * n[a] * dn[b];
          if (bulk) val -= d.du_dmu * dn[a] * n[b];
          trips.emplace_back(la, mb, w * val);
        }
        if (ma >= 0) {
          // d R_mu / d lambda
          double val = -fp * d.de_dlambda * dn[a] * n[b];
          if (bulk) val -= d.du_dlambda_x * n[a] * dn[b];
          trips.emplace_back(ma, lb, w * val);
          // d R_mu / d mu
          if (mb >= 0) {
            double vmm = -fp * d.de_dmu_x * dn[a] * dn[b];
            if (bulk) vmm -= d.du_dmu * n[a] * n[b];
            trips.emplace_back(ma, mb, w * vmm);
          }
        }
      }
    }
  });
  Eigen::SparseMatrix<double> J(n_free(), n_free());
  J.setFromTriplets(trips.begin(), trips.end());
  return J;
}

QpField StaticDualProblem::recover_primal(
    const Eigen::VectorXd& free_dofs) const {
  QpField f;
  const std::size_t total =
      static_cast<std::size_t>(mesh_.n_elements()) * mesh_.quad().size();
  f.x.reserve(total);
  f.weight.reserve(total);
  f.u.reserve(total);
  f.e.reserve(total);
  f.element.reserve(total);
  for_each_qp(free_dofs, [&](int e, int, double w, double, double, double,
                             const PointState& s) {
    f.x.push_back(s.x);
    f.weight.push_back(w);
    f.u.push_back(s.primal.u);
    f.e.push_back(s.primal.e);
    f.element.push_back(e);
  });
  return f;
}

double StaticDualProblem::max_mapping_residual(
    const Eigen::VectorXd& free_dofs) const {
  double worst = 0.0;
  for_each_qp(free_dofs, [&](int, int, double, double, double, double,
                             const PointState& s) {
    const double ru =
        -s.dual.lambda_x - s.dual.mu + aux_.c_u * (s.primal.u - s.base.u_bar);
    const double re = static_strain_residual(s.dual, s.base, aux_, s.primal.e);
    worst = std::max({worst, std::abs(ru), std::abs(re)});
  });
  return worst;
}

Eigen::VectorXd l2_project(const std::vector<double>& values,
                           const QpField& points, const Mesh1D& mesh) {
  if (values.size() != points.x.size()) {
    throw std::invalid_argument("l2_project: field/point size mismatch");
  }
  const int n = mesh.n_nodes();
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < points.x.size(); ++k) {
    const int e = points.element[k];
    const double h = mesh.element_size(e);
    const double xi = 2.0 * (points.x[k] - mesh.element_left(e)) / h - 1.0;
    const double n_a[2] = {0.5 * (1.0 - xi), 0.5 * (1.0 + xi)};
    const double w = points.weight[k];
    for (int a = 0; a < 2; ++a) {
      rhs[e + a] += w * values[k] * n_a[a];
      for (int b = 0; b < 2; ++b) {
        trips.emplace_back(e + a, e + b, w * n_a[a] * n_a[b]);
      }
    }
  }
  Eigen::SparseMatrix<double> mass(n, n);
  mass.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(mass);
  if (solver.info() != Eigen::Success) {
    throw SingularMatrixError("l2_project: mass matrix factorization failed");
  }
  return solver.solve(rhs);
}

Eigen::VectorXd l2_project(const QpField& data, const Mesh1D& mesh) {
  return l2_project(data.u, data, mesh);
}

double l1_norm(const QpField& data) {
  double sum = 0.0;
  for (std::size_t k = 0; k < data.u.size(); ++k) {
    sum += data.weight[k] * std::abs(data.u[k]);
  }
  return sum;
}

double l1_norm_nodal(const std::vector<double>& nodal_values,
                     const Mesh1D& mesh) {
  const QuadRule& q = mesh.quad();
  double sum = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double h = mesh.element_size(e);
    for (int k = 0; k < q.size(); ++k) {
      const double xi = q.points[k];
      const double v = 0.5 * (1.0 - xi) * nodal_values[e] +
                       0.5 * (1.0 + xi) * nodal_values[e + 1];
      sum += q.weights[k] * 0.5 * h * std::abs(v);
    }
  }
  return sum;
}

double l1_norm(const std::function<double(double)>& f, const Mesh1D& mesh,
               int quad_points) {
  const QuadRule q = QuadRule::gauss(quad_points);
  double sum = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double xl = mesh.element_left(e);
    const double h = mesh.element_size(e);
    for (int k = 0; k < q.size(); ++k) {
      const double x = xl + 0.5 * h * (1.0 + q.points[k]);
      sum += q.weights[k] * 0.5 * h * std::abs(f(x));
    }
  }
  return sum;
}

double eval_nodal(const std::vector<double>& nodal_values, const Mesh1D& mesh,
                  double x) {
  const auto& nodes = mesh.nodes();
  if (x <= nodes.front()) return nodal_values.front();
  if (x >= nodes.back()) return nodal_values.back();
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  const int e = static_cast<int>(it - nodes.begin()) - 1;
  const double t = (x - nodes[e]) / (nodes[e + 1] - nodes[e]);
  return (1.0 - t) * nodal_values[e] + t * nodal_values[e + 1];
}

}  // namespace dve
