#include "dve/fem_spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dve/errors.hpp"
#include "dve/material.hpp"

namespace dve {
namespace {

// Bilinear shapes on [-1,1]^2; local node order (00, 10, 01, 11).
void shape_values(double xi, double eta, double hx, double ht, double n[4],
                  double nx[4], double nt[4]) {
  const double xm = 0.5 * (1.0 - xi), xp = 0.5 * (1.0 + xi);
  const double em = 0.5 * (1.0 - eta), ep = 0.5 * (1.0 + eta);
  n[0] = xm * em;
  n[1] = xp * em;
  n[2] = xm * ep;
  n[3] = xp * ep;
  const double dx = 1.0 / hx;  // d(xi)/dx * dN/dxi with dN/dxi = +-1/2 * (...)
  nx[0] = -em * dx;
  nx[1] = em * dx;
  nx[2] = -ep * dx;
  nx[3] = ep * dx;
  const double dt = 1.0 / ht;
  nt[0] = -xm * dt;
  nt[1] = -xp * dt;
  nt[2] = xm * dt;
  nt[3] = xp * dt;
}

}  // namespace

SpaceTimeBase SpaceTimeBase::time_constant(PiecewisePoly v, PiecewisePoly e) {
  SpaceTimeBase b;
  b.v_bar = [v = std::move(v)](double x, double) { return v(x); };
  b.e_bar = [e = std::move(e)](double x, double) { return e(x); };
  return b;
}

DynamicDualProblem::DynamicDualProblem(SpaceTimeMesh mesh, SpaceTimeBase base,
                                       DynamicCase data, AuxParams aux,
                                       DtpOptions dtp_options)
    : mesh_(std::move(mesh)),
      base_(std::move(base)),
      data_(std::move(data)),
      aux_(aux),
      dtp_options_(dtp_options) {
  const int nx = mesh_.nx(), nt = mesh_.nt();
  l_index_.assign(mesh_.n_nodes(), -1);
  p_index_.assign(mesh_.n_nodes(), -1);
  int next = 0;
  for (int j = 0; j <= nt; ++j) {
    for (int i = 0; i <= nx; ++i) {
      if (i > 0 && i < nx && j < nt) l_index_[mesh_.node_id(i, j)] = next++;
    }
  }
  for (int j = 0; j <= nt; ++j) {
    for (int i = 0; i <= nx; ++i) {
      if (j < nt) p_index_[mesh_.node_id(i, j)] = next++;
    }
  }
  n_free_ = next;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> DynamicDualProblem::nodal_duals(
    const Eigen::VectorXd& free_dofs) const {
  Eigen::VectorXd L = Eigen::VectorXd::Zero(mesh_.n_nodes());
  Eigen::VectorXd P = Eigen::VectorXd::Zero(mesh_.n_nodes());
  for (int n = 0; n < mesh_.n_nodes(); ++n) {
    if (l_index_[n] >= 0) L[n] = free_dofs[l_index_[n]];
    if (p_index_[n] >= 0) P[n] = free_dofs[p_index_[n]];
  }
  return {L, P};
}

template <class Visit>
void DynamicDualProblem::for_each_qp(const Eigen::VectorXd& free_dofs,
                                     Visit&& visit) const {
  const auto [L, P] = nodal_duals(free_dofs);
  const QuadRule& q = mesh_.quad();
  const auto& xs = mesh_.x_nodes();
  const auto& ts = mesh_.t_nodes();
  int nodes[4];
  double n[4], nx[4], nt[4];
  for (int j = 0; j < mesh_.nt(); ++j) {
    const double tl = ts[j];
    const double ht = ts[j + 1] - ts[j];
    for (int i = 0; i < mesh_.nx(); ++i) {
      const double xl = xs[i];
      const double hx = xs[i + 1] - xs[i];
      nodes[0] = mesh_.node_id(i, j);
      nodes[1] = mesh_.node_id(i + 1, j);
      nodes[2] = mesh_.node_id(i, j + 1);
      nodes[3] = mesh_.node_id(i + 1, j + 1);
      for (int kt = 0; kt < q.size(); ++kt) {
        for (int kx = 0; kx < q.size(); ++kx) {
          const double xi = q.points[kx];
          const double eta = q.points[kt];
          const double w = q.weights[kx] * q.weights[kt] * 0.25 * hx * ht;
          shape_values(xi, eta, hx, ht, n, nx, nt);
          PointState s;
          s.x = xl + 0.5 * hx * (1.0 + xi);
          s.t = tl + 0.5 * ht * (1.0 + eta);
          s.base.u_bar = base_.v_bar(s.x, s.t);
          s.base.e_bar = base_.e_bar(s.x, s.t);
          for (int a = 0; a < 4; ++a) {
            const double lv = L[nodes[a]], pv = P[nodes[a]];
            s.dual.l_t += lv * nt[a];
            s.dual.l_x += lv * nx[a];
            s.dual.p_t += pv * nt[a];
            s.dual.p_x += pv * nx[a];
          }
          try {
            s.primal = dtp_dynamic(s.dual, s.base, aux_, dtp_options_);
          } catch (const DtpError& err) {
            std::ostringstream msg;
            msg << err.what() << " [cell (" << i << ", " << j << "), x = "
                << s.x << ", t = " << s.t << "]";
            throw DtpError(err.kind(), msg.str());
          }
          visit(i, j, nodes, w, n, nx, nt, s);
        }
      }
    }
  }
}

Eigen::VectorXd DynamicDualProblem::assemble_residual(
    const Eigen::VectorXd& free_dofs) const {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n_free_);
  for_each_qp(free_dofs, [&](int, int, const int* nodes, double w,
                             const double* n, const double* nx,
                             const double* nt, const PointState& s) {
    const double sig = stress(s.primal.e);
    for (int a = 0; a < 4; ++a) {
      const int li = l_index_[nodes[a]];
      if (li >= 0) {
        r[li] += w * (-aux_.rho0 * nt[a] * s.primal.u + sig * nx[a]);
      }
      const int pi = p_index_[nodes[a]];
      if (pi >= 0) {
        r[pi] += w * (nx[a] * s.primal.u - nt[a] * s.primal.e);
      }
    }
    (void)n;
  });

  // Initial data enter on the t = 0 edge; velocity data on the lateral
  // edges. Edge rules reuse the volume rule's 1-d points so that an
  // equilibrium base state cancels exactly against matching initial data.
  const QuadRule& q = mesh_.quad();
  const auto& xs = mesh_.x_nodes();
  const auto& ts = mesh_.t_nodes();
  for (int i = 0; i < mesh_.nx(); ++i) {
    const double xl = xs[i];
    const double hx = xs[i + 1] - xs[i];
    const int n0 = mesh_.node_id(i, 0), n1 = mesh_.node_id(i + 1, 0);
    for (int k = 0; k < q.size(); ++k) {
      const double xi = q.points[k];
      const double w = q.weights[k] * 0.5 * hx;
      const double x = xl + 0.5 * hx * (1.0 + xi);
      const double sh[2] = {0.5 * (1.0 - xi), 0.5 * (1.0 + xi)};
      const int nn[2] = {n0, n1};
      const double e0 = data_.e0(x);
      const double v0 = data_.v0(x);
      for (int a = 0; a < 2; ++a) {
        const int li = l_index_[nn[a]];
        if (li >= 0) r[li] += w * (-aux_.rho0 * sh[a] * v0);
        const int pi = p_index_[nn[a]];
        if (pi >= 0) r[pi] += w * (-sh[a] * e0);
      }
    }
  }
  for (int j = 0; j < mesh_.nt(); ++j) {
    const double tl = ts[j];
    const double ht = ts[j + 1] - ts[j];
    const int left[2] = {mesh_.node_id(0, j), mesh_.node_id(0, j + 1)};
    const int right[2] = {mesh_.node_id(mesh_.nx(), j),
                          mesh_.node_id(mesh_.nx(), j + 1)};
    for (int k = 0; k < q.size(); ++k) {
      const double eta = q.points[k];
      const double w = q.weights[k] * 0.5 * ht;
      const double t = tl + 0.5 * ht * (1.0 + eta);
      const double sh[2] = {0.5 * (1.0 - eta), 0.5 * (1.0 + eta)};
      for (int a = 0; a < 2; ++a) {
        const int pl = p_index_[left[a]];
        if (pl >= 0) r[pl] += w * sh[a] * data_.v_left(t);
        const int pr = p_index_[right[a]];
        if (pr >= 0) r[pr] -= w * sh[a] * data_.v_right(t);
      }
    }
  }
  return r;
}

Eigen::SparseMatrix<double> DynamicDualProblem::assemble_jacobian(
    const Eigen::VectorXd& free_dofs) const {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(mesh_.nx()) * mesh_.nt() * 64);
  for_each_qp(free_dofs, [&](int, int, const int* nodes, double w,
                             const double* n, const double* nx,
                             const double* nt, const PointState& s) {
    const DynamicDtpDerivatives d =
        dtp_dynamic_derivatives(s.dual, s.base, aux_, s.primal.e);
    const double st = stiffness(s.primal.e);
    for (int a = 0; a < 4; ++a) {
      const int la = l_index_[nodes[a]];
      const int pa = p_index_[nodes[a]];
      for (int b = 0; b < 4; ++b) {
        const int lb = l_index_[nodes[b]];
        const int pb = p_index_[nodes[b]];
        if (la >= 0 && lb >= 0) {
          trips.emplace_back(la, lb,
                             w * (-aux_.rho0 * nt[a] * d.dv_dl_t * nt[b] +
                                  st * d.de_dl_x * nx[a] * nx[b]));
        }
        if (la >= 0 && pb >= 0) {
          trips.emplace_back(la, pb,
                             w * (-aux_.rho0 * nt[a] * d.dv_dp_x * nx[b] +
                                  st * d.de_dp_t * nx[a] * nt[b]));
        }
        if (pa >= 0 && lb >= 0) {
          trips.emplace_back(pa, lb,
                             w * (nx[a] * d.dv_dl_t * nt[b] -
                                  nt[a] * d.de_dl_x * nx[b]));
        }
        if (pa >= 0 && pb >= 0) {
          trips.emplace_back(pa, pb,
                             w * (nx[a] * d.dv_dp_x * nx[b] -
                                  nt[a] * d.de_dp_t * nt[b]));
        }
      }
    }
    (void)n;
  });
  Eigen::SparseMatrix<double> J(n_free_, n_free_);
  J.setFromTriplets(trips.begin(), trips.end());
  return J;
}

StQpField DynamicDualProblem::recover_primal(
    const Eigen::VectorXd& free_dofs) const {
  StQpField f;
  const std::size_t total = static_cast<std::size_t>(mesh_.nx()) *
                            mesh_.nt() * mesh_.quad().size() *
                            mesh_.quad().size();
  f.x.reserve(total);
  f.t.reserve(total);
  f.weight.reserve(total);
  f.v.reserve(total);
  f.e.reserve(total);
  f.cell_i.reserve(total);
  f.cell_j.reserve(total);
  for_each_qp(free_dofs, [&](int i, int j, const int*, double w,
                             const double*, const double*, const double*,
                             const PointState& s) {
    f.x.push_back(s.x);
    f.t.push_back(s.t);
    f.weight.push_back(w);
    f.v.push_back(s.primal.u);
    f.e.push_back(s.primal.e);
    f.cell_i.push_back(i);
    f.cell_j.push_back(j);
  });
  return f;
}

double DynamicDualProblem::max_mapping_residual(
    const Eigen::VectorXd& free_dofs) const {
  double worst = 0.0;
  for_each_qp(free_dofs, [&](int, int, const int*, double, const double*,
                             const double*, const double*,
                             const PointState& s) {
    const double rv = aux_.c_v * (s.primal.u - s.base.u_bar) -
                      (aux_.rho0 * s.dual.l_t - s.dual.p_x);
    const double re =
        dynamic_strain_residual(s.dual, s.base, aux_, s.primal.e);
    worst = std::max({worst, std::abs(rv), std::abs(re)});
  });
  return worst;
}

Eigen::VectorXd st_l2_project(const std::vector<double>& values,
                              const StQpField& points,
                              const SpaceTimeMesh& mesh) {
  if (values.size() != points.x.size()) {
    throw std::invalid_argument("st_l2_project: field/point size mismatch");
  }
  const int n = mesh.n_nodes();
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  const auto& xs = mesh.x_nodes();
  const auto& ts = mesh.t_nodes();
  for (std::size_t k = 0; k < points.x.size(); ++k) {
    const int i = points.cell_i[k], j = points.cell_j[k];
    const double hx = xs[i + 1] - xs[i];
    const double ht = ts[j + 1] - ts[j];
    const double xi = 2.0 * (points.x[k] - xs[i]) / hx - 1.0;
    const double eta = 2.0 * (points.t[k] - ts[j]) / ht - 1.0;
    double n4[4], nx4[4], nt4[4];
    shape_values(xi, eta, hx, ht, n4, nx4, nt4);
    const int nodes[4] = {mesh.node_id(i, j), mesh.node_id(i + 1, j),
                          mesh.node_id(i, j + 1), mesh.node_id(i + 1, j + 1)};
    const double w = points.weight[k];
    for (int a = 0; a < 4; ++a) {
      rhs[nodes[a]] += w * values[k] * n4[a];
      for (int b = 0; b < 4; ++b) {
        trips.emplace_back(nodes[a], nodes[b], w * n4[a] * n4[b]);
      }
    }
  }
  Eigen::SparseMatrix<double> mass(n, n);
  mass.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(mass);
  if (solver.info() != Eigen::Success) {
    throw SingularMatrixError("st_l2_project: mass factorization failed");
  }
  return solver.solve(rhs);
}

}  // namespace dve
