#pragma once

#include <Eigen/Dense>

#include "dve/material.hpp"

namespace dve {

/// Controls for the inner maximization over deformation-gradient space:
/// a coarse grid (2-d only) plus the analytic witness points seed a
/// backtracking gradient ascent; the best ascent result is the reported sup.
struct SupOptions {
  double grid_halfwidth = 5.0;
  int grid_points = 17;  // per axis; the grid is skipped for d = 3
  int ascent_starts = 8;
  int ascent_max_iter = 300;
};

/// Dual-density argument for the Saint Venant-Kirchhoff model: A pairs with
/// mu, a with div(mu), B with grad(lambda).
struct SvkDualPoint {
  Eigen::MatrixXd A;
  Eigen::VectorXd a;
  Eigen::MatrixXd B;
};

/// Objective of the F-maximization inside the SVK dual density:
/// A : F + B : P(F) - ((G + L/2)/2) |F^T F|^2.
double svk_objective(const SvkDualPoint& point, const SvkParams& params,
                     const Eigen::MatrixXd& F);

/// Dual density g(A, a, B) = (3/4)|a|^{4/3} + sup_F svk_objective.
/// The y-part is closed form; the F-part is the multistart numeric sup,
/// guaranteed >= the value at every analytic witness. Optionally returns the
/// maximizing F.
double g_svk(const SvkDualPoint& point, const SvkParams& params,
             const SupOptions& options = {},
             Eigen::MatrixXd* argmax = nullptr);

/// Normalized inner sup h = (g - (3/4)|a|^{4/3}) / (2G + L).
double svk_h_sup(const SvkDualPoint& point, const SvkParams& params,
                 const SupOptions& options = {});

/// Parameter-level constants of the coercivity bound, assembled from the
/// three witness regimes.
struct SvkBoundConstants {
  double m = 0.0;          // 2G + L
  double w = 0.0;          // bound on the normalized cubic coefficient
  double gamma_low = 0.0;  // lower bound of the B-ray cubic coefficient
  double t1 = 0.0;         // case-1 regime: |B|^3 <= t1 |A~|
  double t2 = 0.0;         // case-3 regime: |B|^3 >= t2 |A~|
  double kappa[3] = {0.0, 0.0, 0.0};
  double kappa_min = 0.0;
  double c_global = 0.0;   // g >= c (|a|^{4/3} + |A|^{4/3} + |B|^4) - 1/c
};
SvkBoundConstants svk_bound_constants(const SvkParams& params);

/// Normalized shifted argument A~ = (A - (G + L d/2) B) / (2G + L).
Eigen::MatrixXd svk_a_tilde(const SvkDualPoint& point, const SvkParams& params);

/// Which witness regime covers the point (1, 2 or 3).
int svk_witness_case(const SvkDualPoint& point, const SvkParams& params);

/// Value of the normalized objective at the regime's witness F. Guaranteed
/// >= kappa[case-1] * (|A~|^{4/3} + |B|^4). Throws RegimeMismatchError when
/// the requested case does not cover the point.
double svk_witness_value(const SvkDualPoint& point, const SvkParams& params,
                         int case_id);

/// Assembled lower bound c (|a|^{4/3} + |A|^{4/3} + |B|^4) - 1/c.
double svk_lower_bound(const SvkDualPoint& point, const SvkParams& params);

/// Witness-form lower bound (3/4)|a|^{4/3} + m kappa_case (|A~|^{4/3}+|B|^4).
double svk_witness_bound(const SvkDualPoint& point, const SvkParams& params);

/// Dual-density argument for the 2-d incompressible neo-Hookean model;
/// s pairs with the determinant-constraint multiplier.
struct NeoHookeanDualPoint {
  Eigen::Matrix2d A;
  Eigen::Vector2d a;
  Eigen::Matrix2d B;
  double s = 0.0;
};

/// F-objective with the pressure maximized in closed form:
/// (A + B) : F + s det F + (3/4)|cof(B) : F|^{4/3} - (1/2)|F|^2.
double neo_objective(const NeoHookeanDualPoint& point,
                     const Eigen::Matrix2d& F);

/// Dual density. Returns +infinity for |s| > 1, established by following an
/// unbounded ray; otherwise (1/2)|a|^2 - s + numeric sup of neo_objective.
double g_neo_hookean(const NeoHookeanDualPoint& point,
                     const SupOptions& options = {},
                     Eigen::Matrix2d* argmax = nullptr);

/// Coercivity bound c (|a|^2 + |A+B|^2 + |B|^4) - 1 valid for |s| <= 1.
double neo_lower_bound(const NeoHookeanDualPoint& point);

/// Growth bound |a|^2 + |A+B|^2/(1-|s|) + |B|^4/(1-|s|)^2 + 1 for |s| < 1.
double neo_upper_bound(const NeoHookeanDualPoint& point);

}  // namespace dve
