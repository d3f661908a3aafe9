#pragma once

namespace dve {

/// Coefficients of the auxiliary potential H (shifted quadratic in the
/// displacement/velocity slot, shifted quadratic-plus-|cubic| in strain).
/// All must be strictly positive; c_v and rho0 matter only for dynamics.
struct AuxParams {
  double c_u = 100.0;
  double c_e = 100.0;
  double c_v = 100.0;
  double rho0 = 1.0;
};

/// Pointwise dual data for statics.
struct StaticPointDual {
  double lambda = 0.0;
  double lambda_x = 0.0;
  double mu = 0.0;
  double mu_x = 0.0;
};

/// Pointwise dual data for dynamics.
struct DynamicPointDual {
  double l_t = 0.0;
  double l_x = 0.0;
  double p_t = 0.0;
  double p_x = 0.0;
};

/// Base-state values at a point: (u_bar, e_bar) for statics, the first slot
/// holds v_bar for dynamics.
struct PointBase {
  double u_bar = 0.0;
  double e_bar = 0.0;
};

struct DtpOptions {
  double trust_radius = 5.0;  // strain bracket is [e_bar - R, e_bar + R]
  int max_iterations = 200;
};

struct PointPrimal {
  double u = 0.0;  // v for dynamics
  double e = 0.0;
};

/// Solve the static mapping equations for (u_hat, e_hat):
///   u_hat = (lambda_x + mu) / c_u + u_bar,
///   -6 (e_hat - 1)^2 mu_x + 2 mu_x - lambda
///     + c_e (e_hat - e_bar) |e_hat - e_bar| + c_e (e_hat - e_bar) = 0.
/// The strain equation is solved for the branch continued from
/// e_hat = e_bar at zero dual state: safeguarded Newton with bisection on
/// the sign change nearest e_bar inside the trust interval, accepted only
/// with positive slope there. Residual tolerance is 1e-12 * max(1, c_e).
/// Throws DtpError: NoBracket when no root lies inside the trust interval,
/// NonMonotone when the branch has folded (non-positive slope at the root).
PointPrimal dtp_static(const StaticPointDual& dual, const PointBase& base,
                       const AuxParams& aux, const DtpOptions& opts = {});

struct StaticDtpDerivatives {
  double du_dlambda_x = 0.0;
  double du_dmu = 0.0;
  double de_dlambda = 0.0;
  double de_dmu_x = 0.0;
};

/// Implicit derivatives of the static mapping at a solved e_hat.
/// Throws DtpError(SingularDerivative) when the strain equation's slope
/// vanishes (|g'| < 1e-12 * c_e).
StaticDtpDerivatives dtp_static_derivatives(const StaticPointDual& dual,
                                            const PointBase& base,
                                            const AuxParams& aux,
                                            double e_hat);

/// Solve the dynamic mapping equations for (v_hat, e_hat):
///   v_hat = (rho0 L_t - P_x) / c_v + v_bar,
///   c_e (e_hat - e_bar) |e_hat - e_bar| + c_e (e_hat - e_bar)
///     - P_t + L_x sigma'(e_hat) = 0.
PointPrimal dtp_dynamic(const DynamicPointDual& dual, const PointBase& base,
                        const AuxParams& aux, const DtpOptions& opts = {});

struct DynamicDtpDerivatives {
  double dv_dl_t = 0.0;
  double dv_dp_x = 0.0;
  double de_dp_t = 0.0;
  double de_dl_x = 0.0;
};

DynamicDtpDerivatives dtp_dynamic_derivatives(const DynamicPointDual& dual,
                                              const PointBase& base,
                                              const AuxParams& aux,
                                              double e_hat);

/// Residuals of the mapping equations at given primal values; used to verify
/// solved points.
double static_strain_residual(const StaticPointDual& dual,
                              const PointBase& base, const AuxParams& aux,
                              double e_hat);
double dynamic_strain_residual(const DynamicPointDual& dual,
                               const PointBase& base, const AuxParams& aux,
                               double e_hat);

}  // namespace dve
