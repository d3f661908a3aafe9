#pragma once

#include <Eigen/Dense>

#include "dve/errors.hpp"

namespace dve {

// Double-well law used by all 1-d problems. Energy wells sit at strains 0
// and 2, the local maximum at strain 1; stiffness is negative on
// (1 - 1/sqrt(3), 1 + 1/sqrt(3)).

/// Energy density ((e-1)^2 - 1)^2.
double energy_density(double e);

/// Stress sigma(e) = 4 (e-1) ((e-1)^2 - 1) = d/de energy_density.
double stress(double e);

/// Weak-form flux 2 ((e-1)^3 - (e-1)) = sigma(e) / 2.
double flux(double e);

/// Stiffness sigma'(e) = 12 (e-1)^2 - 4.
double stiffness(double e);

/// Flux linearization 2 (3 (e-1)^2 - 1) = stiffness(e) / 2.
double flux_derivative(double e);

/// sigma''(e) = 24 (e-1).
double stiffness_derivative(double e);

/// Saint Venant-Kirchhoff material constants. Requires shear > 0 and
/// shear + (dim/2) * lame > 0.
struct SvkParams {
  double shear = 1.0;
  double lame = 0.0;
  int dim = 2;

  bool valid() const {
    return (dim == 2 || dim == 3) && shear > 0.0 &&
           shear + 0.5 * static_cast<double>(dim) * lame > 0.0;
  }
};

/// First Piola-Kirchhoff stress
/// P(F) = F (G F^T F + (L/2) |F|^2 I - (G + L d / 2) I).
Eigen::MatrixXd svk_stress(const Eigen::MatrixXd& F, const SvkParams& params);

/// Cofactor matrix of a 2x2 matrix.
Eigen::Matrix2d cofactor(const Eigen::Matrix2d& F);

/// Incompressible neo-Hookean stress (2-d, unit shear modulus):
/// P(F, p) = F - p cof(F).
Eigen::Matrix2d neo_hookean_stress(const Eigen::Matrix2d& F, double pressure);

}  // namespace dve
