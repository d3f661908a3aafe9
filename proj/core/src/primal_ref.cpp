#include "dve/primal_ref.hpp"

#include <Eigen/Sparse>
#include <cmath>
#include <stdexcept>

#include "dve/errors.hpp"
#include "dve/material.hpp"

namespace dve {
namespace {

constexpr double kBlowUpStrain = 1e3;

std::vector<double> element_strains(const std::vector<double>& u,
                                    const Mesh1D& mesh) {
  std::vector<double> e(mesh.n_elements());
  for (int k = 0; k < mesh.n_elements(); ++k) {
    e[k] = (u[k + 1] - u[k]) / mesh.element_size(k);
  }
  return e;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

double cfl_time_step(const DynamicCase& data, const Mesh1D& mesh, double rho0,
                     double safety) {
  double max_stiff = 0.0;
  for (int k = 0; k < mesh.n_elements(); ++k) {
    const double xm =
        mesh.element_left(k) + 0.5 * mesh.element_size(k);
    max_stiff = std::max(max_stiff, std::abs(stiffness(data.e0(xm))));
  }
  max_stiff = std::max(max_stiff, 1e-8);
  const double c = std::sqrt(max_stiff / rho0);
  double h_min = mesh.element_size(0);
  for (int k = 1; k < mesh.n_elements(); ++k) {
    h_min = std::min(h_min, mesh.element_size(k));
  }
  return safety * h_min / c;
}

PrimalRunResult evolve_primal(const DynamicCase& data, const Mesh1D& mesh,
                              double dt, int n_steps, double rho0,
                              int snapshot_every) {
  if (!(dt > 0.0) || n_steps < 1) {
    throw std::invalid_argument("evolve_primal: need dt > 0, n_steps >= 1");
  }
  const int n = mesh.n_nodes();

  // Consistent Galerkin mass over the interior nodes (ends follow the
  // velocity data). Factorized once; the update stays explicit.
  std::vector<Eigen::Triplet<double>> trips;
  for (int k = 0; k < mesh.n_elements(); ++k) {
    const double h = mesh.element_size(k);
    const int a = k, b = k + 1;
    const double diag = h / 3.0, off = h / 6.0;
    const auto add = [&](int r, int c, double v) {
      if (r >= 1 && r <= n - 2 && c >= 1 && c <= n - 2) {
        trips.emplace_back(r - 1, c - 1, v);
      }
    };
    add(a, a, diag);
    add(b, b, diag);
    add(a, b, off);
    add(b, a, off);
  }
  Eigen::SparseMatrix<double> mass(n - 2, n - 2);
  mass.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> mass_solver(mass);
  if (mass_solver.info() != Eigen::Success) {
    throw SingularMatrixError("evolve_primal: mass factorization failed");
  }

  // Initial displacement: antiderivative of e0 with u(0) = 0.
  const PiecewisePoly u0 = data.e0.antiderivative(0.0);
  std::vector<double> u_prev(n), v0(n);
  for (int i = 0; i < n; ++i) {
    u_prev[i] = u0(mesh.node(i));
    v0[i] = data.v0(mesh.node(i));
  }

  // Interior accelerations from M a = -f; boundary nodes are driven by the
  // prescribed velocities directly, so their inertia rows are dropped.
  Eigen::VectorXd rhs(n - 2);
  const auto accel = [&](const std::vector<double>& u,
                         std::vector<double>& a) {
    std::vector<double> f(n, 0.0);  // internal force  int sigma N^A_x
    for (int k = 0; k < mesh.n_elements(); ++k) {
      const double sig = stress((u[k + 1] - u[k]) / mesh.element_size(k));
      f[k] -= sig;
      f[k + 1] += sig;
    }
    for (int i = 1; i <= n - 2; ++i) rhs[i - 1] = -f[i] / rho0;
    const Eigen::VectorXd sol = mass_solver.solve(rhs);
    a[0] = 0.0;
    a[n - 1] = 0.0;
    for (int i = 1; i <= n - 2; ++i) a[i] = sol[i - 1];
  };

  PrimalRunResult out;
  const auto record = [&](int step, double t, const std::vector<double>& u,
                          const std::vector<double>& v) {
    const std::vector<double> e = element_strains(u, mesh);
    out.times.push_back(t);
    out.max_abs_strain.push_back(max_abs(e));
    if (snapshot_every > 0 && step % snapshot_every == 0) {
      out.snapshots.push_back({t, u, v, e});
    }
  };

  record(0, 0.0, u_prev, v0);

  // First step by Taylor expansion, then centered differences.
  std::vector<double> a(n, 0.0), u_curr(n), u_next(n), v_mid(n);
  accel(u_prev, a);
  for (int i = 0; i < n; ++i) {
    u_curr[i] = u_prev[i] + dt * v0[i] + 0.5 * dt * dt * a[i];
  }
  u_curr[0] = u_prev[0] + dt * data.v_left(0.5 * dt);
  u_curr[n - 1] = u_prev[n - 1] + dt * data.v_right(0.5 * dt);

  for (int step = 1; step <= n_steps; ++step) {
    const double t = step * dt;
    {
      const std::vector<double> e = element_strains(u_curr, mesh);
      const double m = max_abs(e);
      if (!all_finite(u_curr) || !std::isfinite(m) || m > kBlowUpStrain) {
        out.blew_up = true;
        out.blow_up_time = t;
        break;
      }
    }
    for (int i = 0; i < n; ++i) {
      v_mid[i] = (u_curr[i] - u_prev[i]) / dt;  // velocity at t - dt/2
    }
    record(step, t, u_curr, v_mid);
    if (step == n_steps) break;

    accel(u_curr, a);
    for (int i = 0; i < n; ++i) {
      u_next[i] = 2.0 * u_curr[i] - u_prev[i] + dt * dt * a[i];
    }
    u_next[0] = u_curr[0] + dt * data.v_left(t + 0.5 * dt);
    u_next[n - 1] = u_curr[n - 1] + dt * data.v_right(t + 0.5 * dt);
    u_prev.swap(u_curr);
    u_curr.swap(u_next);
  }
  return out;
}

}  // namespace dve
