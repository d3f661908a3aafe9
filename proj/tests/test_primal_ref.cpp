#include <doctest.h>

#include <cmath>
#include <vector>

#include "dve/cases.hpp"
#include "dve/material.hpp"
#include "dve/primal_ref.hpp"

using namespace dve;

namespace {

// Quartic displacement bump with compact support, as a piecewise profile.
PiecewisePoly bump_strain(double amplitude, double center, double halfwidth,
                          double e_mean) {
  const std::vector<double> in_t = {amplitude, 0.0, -2.0 * amplitude, 0.0,
                                    amplitude};
  std::vector<double> seg =
      PiecewisePoly::affine_substitution(in_t, 1.0 / halfwidth, -1.0);
  const PiecewisePoly u_bump(
      {0.0, center - halfwidth, center + halfwidth, 1.0},
      {{0.0}, std::move(seg), {0.0}});
  return PiecewisePoly::sum(PiecewisePoly::constant(e_mean),
                            u_bump.derivative_poly());
}

DynamicCase convex_pulse_case(double amplitude) {
  DynamicCase c;
  c.e0 = bump_strain(amplitude, 0.5, 0.08, 2.5);
  c.v0 = PiecewisePoly::constant(0.0);
  c.t_final = 0.06;
  return c;
}

double total_energy(const PrimalSnapshot& snap, const Mesh1D& mesh,
                    double rho0) {
  double kinetic = 0.0, elastic = 0.0;
  for (int k = 0; k < mesh.n_elements(); ++k) {
    const double h = mesh.element_size(k);
    elastic += h * energy_density(snap.e[k]);
    kinetic += 0.25 * rho0 * h *
               (snap.v[k] * snap.v[k] + snap.v[k + 1] * snap.v[k + 1]);
  }
  return kinetic + elastic;
}

// Position of the right-moving peak of |u - u_background| restricted to
// x > x_min.
double peak_position(const PrimalSnapshot& snap, const Mesh1D& mesh,
                     const PiecewisePoly& u_bg, double x_min) {
  double best = 0.0, best_x = x_min;
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    const double x = mesh.node(i);
    if (x < x_min) continue;
    const double dev = std::abs(snap.u[i] - u_bg(x));
    if (dev > best) {
      best = dev;
      best_x = x;
    }
  }
  return best_x;
}

}  // namespace

TEST_CASE("bounded evolution and small energy drift in the convex regime") {
  const DynamicCase data = convex_pulse_case(1e-3);
  const Mesh1D mesh = Mesh1D::uniform(200);
  const double dt = cfl_time_step(data, mesh, 1.0, 0.1);
  const int n_steps = static_cast<int>(std::ceil(data.t_final / dt));
  const PrimalRunResult run =
      evolve_primal(data, mesh, dt, n_steps, 1.0, /*snapshot_every=*/50);
  CHECK_FALSE(run.blew_up);
  REQUIRE(run.snapshots.size() >= 2);
  const double e0 = total_energy(run.snapshots.front(), mesh, 1.0);
  const double e1 = total_energy(run.snapshots.back(), mesh, 1.0);
  CHECK(std::abs(e1 - e0) / e0 < 0.01);
}

TEST_CASE("pulse splits into waves moving at the linearized speed") {
  const DynamicCase data = convex_pulse_case(1e-3);
  const Mesh1D mesh = Mesh1D::uniform(400);
  const double dt = cfl_time_step(data, mesh, 1.0, 0.1);
  const int n_steps = static_cast<int>(std::ceil(data.t_final / dt));
  const PrimalRunResult run =
      evolve_primal(data, mesh, dt, n_steps, 1.0, /*snapshot_every=*/1);
  REQUIRE_FALSE(run.blew_up);

  const PiecewisePoly u_bg =
      PiecewisePoly::constant(2.5).antiderivative(0.0);
  const double c_expected = std::sqrt(stiffness(2.5) / 1.0);

  // Track the right-moving peak between two times well after the split.
  const auto snap_at = [&](double t) {
    std::size_t best = 0;
    for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
      if (std::abs(run.snapshots[k].t - t) <
          std::abs(run.snapshots[best].t - t)) {
        best = k;
      }
    }
    return run.snapshots[best];
  };
  const PrimalSnapshot s1 = snap_at(0.02);
  const PrimalSnapshot s2 = snap_at(0.05);
  const double x1 = peak_position(s1, mesh, u_bg, 0.52);
  const double x2 = peak_position(s2, mesh, u_bg, 0.52);
  const double c_measured = (x2 - x1) / (s2.t - s1.t);
  CHECK(std::abs(c_measured - c_expected) / c_expected < 0.15);
}

TEST_CASE("second order accuracy in dt via Richardson ratios") {
  const DynamicCase data = convex_pulse_case(1e-3);
  const Mesh1D mesh = Mesh1D::uniform(100);
  const double t_end = 0.02;
  const auto final_u = [&](double dt) {
    const int n_steps = static_cast<int>(std::llround(t_end / dt));
    const PrimalRunResult run =
        evolve_primal(data, mesh, dt, n_steps, 1.0, n_steps);
    REQUIRE_FALSE(run.blew_up);
    REQUIRE(!run.snapshots.empty());
    return run.snapshots.back().u;
  };
  const double dt0 = 6.25e-5;  // well under the stability limit
  const auto u1 = final_u(dt0);
  const auto u2 = final_u(0.5 * dt0);
  const auto u3 = final_u(0.25 * dt0);
  double d12 = 0.0, d23 = 0.0;
  for (std::size_t i = 0; i < u1.size(); ++i) {
    d12 = std::max(d12, std::abs(u1[i] - u2[i]));
    d23 = std::max(d23, std::abs(u2[i] - u3[i]));
  }
  const double ratio = d12 / d23;
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.0);
}

TEST_CASE("grain-boundary equilibrium blows up under the primal scheme") {
  // The resolution must exceed the dual grid for the instability to reach
  // the integrator's stiff-strain stability threshold within the window.
  const CaseSpec spec = build_case("grain_boundary_dynamic");
  const Mesh1D mesh = Mesh1D::uniform(128);
  const double dt = cfl_time_step(spec.dyn, mesh, spec.aux.rho0);
  const int n_steps = static_cast<int>(std::ceil(1.0 / dt)) + 1;
  const PrimalRunResult run =
      evolve_primal(spec.dyn, mesh, dt, n_steps, spec.aux.rho0);
  CHECK(run.blew_up);
  CHECK(run.blow_up_time <= 1.0);
  // Blow-up truncates the series: nothing recorded past the flagged time.
  for (double t : run.times) CHECK(t <= run.blow_up_time);
}

TEST_CASE("cfl bound respects the stiffest initial strain") {
  const CaseSpec spec = build_case("grain_boundary_dynamic");
  const Mesh1D mesh = Mesh1D::uniform(64);
  const double dt = cfl_time_step(spec.dyn, mesh, 1.0, 0.1);
  const double c_max = std::sqrt(stiffness(grain_strain_profile()(0.5)));
  CHECK(dt == doctest::Approx(0.1 * (1.0 / 64.0) / c_max).epsilon(1e-6));
}
