#pragma once

#include <vector>

#include "dve/fem_spacetime.hpp"
#include "dve/mesh.hpp"

namespace dve {

/// One recorded state of the explicit primal integrator. Strain is per
/// element, displacement and velocity per node.
struct PrimalSnapshot {
  double t = 0.0;
  std::vector<double> u;
  std::vector<double> v;
  std::vector<double> e;
};

struct PrimalRunResult {
  std::vector<double> times;
  std::vector<double> max_abs_strain;
  std::vector<PrimalSnapshot> snapshots;
  bool blew_up = false;
  double blow_up_time = 0.0;
};

/// Conservative step size bound: safety * h / max wave speed, with the wave
/// speed taken from max |stiffness| over the initial strain range. The
/// default keeps half the stability margin of the initial data.
double cfl_time_step(const DynamicCase& data, const Mesh1D& mesh, double rho0,
                     double safety = 0.5);

/// Reference integrator: consistent-mass Galerkin in space, explicit
/// centered differences in time. Ends follow the prescribed velocity data.
/// Evolution halts, with blew_up set, once max |e| exceeds 1e3 or any state
/// value stops being finite; no later state is recorded.
PrimalRunResult evolve_primal(const DynamicCase& data, const Mesh1D& mesh,
                              double dt, int n_steps, double rho0 = 1.0,
                              int snapshot_every = 0);

}  // namespace dve
