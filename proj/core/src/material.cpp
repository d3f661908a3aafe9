#include "dve/material.hpp"

namespace dve {

double energy_density(double e) {
  const double y = (e - 1.0) * (e - 1.0) - 1.0;
  return y * y;
}

double stress(double e) {
  const double y = e - 1.0;
  return 4.0 * y * (y * y - 1.0);
}

double flux(double e) {
  const double y = e - 1.0;
  return 2.0 * (y * y * y - y);
}

double stiffness(double e) {
  const double y = e - 1.0;
  return 12.0 * y * y - 4.0;
}

double flux_derivative(double e) {
  const double y = e - 1.0;
  return 2.0 * (3.0 * y * y - 1.0);
}

double stiffness_derivative(double e) { return 24.0 * (e - 1.0); }

Eigen::MatrixXd svk_stress(const Eigen::MatrixXd& F, const SvkParams& params) {
  if (!params.valid() || F.rows() != params.dim || F.cols() != params.dim) {
    throw ConfigError("svk_params", "svk_stress: invalid parameters or shape");
  }
  const double d = static_cast<double>(params.dim);
  const Eigen::MatrixXd C = F.transpose() * F;
  const double f2 = F.squaredNorm();
  Eigen::MatrixXd S = params.shear * C;
  S.diagonal().array() += 0.5 * params.lame * f2 - (params.shear + 0.5 * params.lame * d);
  return F * S;
}

Eigen::Matrix2d cofactor(const Eigen::Matrix2d& F) {
  Eigen::Matrix2d c;
  c << F(1, 1), -F(1, 0), -F(0, 1), F(0, 0);
  return c;
}

Eigen::Matrix2d neo_hookean_stress(const Eigen::Matrix2d& F, double pressure) {
  return F - pressure * cofactor(F);
}

}  // namespace dve
