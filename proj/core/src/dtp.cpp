#include "dve/dtp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dve/errors.hpp"
#include "dve/material.hpp"

namespace dve {
namespace {

double residual_tolerance(const AuxParams& aux) {
  return 1e-12 * std::max(1.0, aux.c_e);
}

// Safeguarded Newton with a bisection safeguard on a sign-change interval.
template <class G, class Gp>
double polish_root(const G& g, const Gp& gp, double a, double ga, double b,
                   double gb, double tol, int max_iterations) {
  if (std::abs(ga) <= tol) return a;
  if (std::abs(gb) <= tol) return b;
  // Orient so g(a) < 0 < g(b).
  if (ga > 0.0) {
    std::swap(a, b);
    std::swap(ga, gb);
  }
  double x = 0.5 * (a + b);
  double gx = g(x);
  for (int iter = 0; iter < max_iterations; ++iter) {
    if (std::abs(gx) <= tol) return x;
    if (gx < 0.0) {
      a = x;
    } else {
      b = x;
    }
    const double slope = gp(x);
    double next = (slope != 0.0) ? x - gx / slope : 0.5 * (a + b);
    const double blo = std::min(a, b), bhi = std::max(a, b);
    if (!(next > blo) || !(next < bhi)) next = 0.5 * (a + b);
    if (std::abs(b - a) <= 8.0 * std::numeric_limits<double>::epsilon() *
                               std::max(1.0, std::abs(x))) {
      return x;
    }
    x = next;
    gx = g(x);
  }
  return x;
}

// Solve the strain equation for the branch continued from e = center (the
// zero-dual-state root). When the convex penalty dominates everywhere the
// equation is strictly monotone on the trust interval and a plain endpoint
// bracket suffices. Otherwise the equation may fold at large |e - center|
// (the auxiliary cubic no longer dominates the flux term there), so the
// nearest sign change to the center is located by an outward grid walk and
// the root accepted only where the branch slope stays positive.
template <class G, class Gp>
double solve_strain_branch(const G& g, const Gp& gp, double center,
                           double radius, double tol, int max_iterations,
                           bool monotone_guaranteed, const char* which) {
  const auto require_stable = [&](double root) {
    if (!(gp(root) > 0.0)) {
      std::ostringstream msg;
      msg << which << ": strain equation slope is non-positive at the root "
          << root << "; the mapping branch has folded (increase c_e)";
      throw DtpError(DtpError::Kind::NonMonotone, msg.str());
    }
    return root;
  };

  const double g0 = g(center);
  if (std::abs(g0) <= tol) return require_stable(center);

  if (monotone_guaranteed) {
    const double lo = center - radius, hi = center + radius;
    const double glo = g(lo), ghi = g(hi);
    if ((glo > 0.0) == (ghi > 0.0)) {
      std::ostringstream msg;
      msg << which << ": strain equation has the same sign at both ends of ["
          << lo << ", " << hi << "]; c_e too small or dual state outside the "
          << "trust region";
      throw DtpError(DtpError::Kind::NoBracket, msg.str());
    }
    return require_stable(
        polish_root(g, gp, lo, glo, hi, ghi, tol, max_iterations));
  }

  constexpr int kHalfSteps = 40;
  const double step = radius / kHalfSteps;
  double above = g0, below = g0;
  for (int k = 1; k <= kHalfSteps; ++k) {
    const double xh = center + k * step;
    const double gh = g(xh);
    if ((gh > 0.0) != (above > 0.0) || gh == 0.0) {
      return require_stable(polish_root(g, gp, xh - step, above, xh, gh, tol,
                                        max_iterations));
    }
    above = gh;
    const double xl = center - k * step;
    const double gl = g(xl);
    if ((gl > 0.0) != (below > 0.0) || gl == 0.0) {
      return require_stable(polish_root(g, gp, xl, gl, xl + step, below, tol,
                                        max_iterations));
    }
    below = gl;
  }
  std::ostringstream msg;
  msg << which << ": no strain root within [" << center - radius << ", "
      << center + radius
      << "]; c_e too small or dual state outside the trust region";
  throw DtpError(DtpError::Kind::NoBracket, msg.str());
}

}  // namespace

double static_strain_residual(const StaticPointDual& dual,
                              const PointBase& base, const AuxParams& aux,
                              double e_hat) {
  const double y = e_hat - 1.0;
  const double s = e_hat - base.e_bar;
  return -6.0 * y * y * dual.mu_x + 2.0 * dual.mu_x - dual.lambda +
         aux.c_e * s * std::abs(s) + aux.c_e * s;
}

double dynamic_strain_residual(const DynamicPointDual& dual,
                               const PointBase& base, const AuxParams& aux,
                               double e_hat) {
  const double s = e_hat - base.e_bar;
  return aux.c_e * s * std::abs(s) + aux.c_e * s - dual.p_t +
         dual.l_x * stiffness(e_hat);
}

PointPrimal dtp_static(const StaticPointDual& dual, const PointBase& base,
                       const AuxParams& aux, const DtpOptions& opts) {
  PointPrimal out;
  out.u = (dual.lambda_x + dual.mu) / aux.c_u + base.u_bar;

  // g' = -12 (e-1) mu_x + c_e (1 + 2 |e - e_bar|); monotone whenever the
  // mu_x term cannot overcome c_e anywhere on the trust interval.
  const double max_abs_em1 = std::abs(base.e_bar - 1.0) + opts.trust_radius;
  const bool monotone = 12.0 * std::abs(dual.mu_x) * max_abs_em1 < aux.c_e;

  const auto g = [&](double e) {
    return static_strain_residual(dual, base, aux, e);
  };
  const auto gp = [&](double e) {
    return -12.0 * (e - 1.0) * dual.mu_x +
           aux.c_e * (1.0 + 2.0 * std::abs(e - base.e_bar));
  };
  out.e = solve_strain_branch(g, gp, base.e_bar, opts.trust_radius,
                              residual_tolerance(aux), opts.max_iterations,
                              monotone, "dtp_static");
  return out;
}

StaticDtpDerivatives dtp_static_derivatives(const StaticPointDual& dual,
                                            const PointBase& base,
                                            const AuxParams& aux,
                                            double e_hat) {
  const double slope = -12.0 * (e_hat - 1.0) * dual.mu_x +
                       aux.c_e * (1.0 + 2.0 * std::abs(e_hat - base.e_bar));
  if (std::abs(slope) < 1e-12 * aux.c_e) {
    throw DtpError(DtpError::Kind::SingularDerivative,
                   "dtp_static_derivatives: strain equation slope ~ 0");
  }
  StaticDtpDerivatives d;
  d.du_dlambda_x = 1.0 / aux.c_u;
  d.du_dmu = 1.0 / aux.c_u;
  d.de_dlambda = 1.0 / slope;
  const double y = e_hat - 1.0;
  d.de_dmu_x = (6.0 * y * y - 2.0) / slope;
  return d;
}

PointPrimal dtp_dynamic(const DynamicPointDual& dual, const PointBase& base,
                        const AuxParams& aux, const DtpOptions& opts) {
  PointPrimal out;
  out.u = (aux.rho0 * dual.l_t - dual.p_x) / aux.c_v + base.u_bar;

  const double max_abs_em1 = std::abs(base.e_bar - 1.0) + opts.trust_radius;
  const bool monotone = 24.0 * std::abs(dual.l_x) * max_abs_em1 < aux.c_e;

  const auto g = [&](double e) {
    return dynamic_strain_residual(dual, base, aux, e);
  };
  const auto gp = [&](double e) {
    return aux.c_e * (1.0 + 2.0 * std::abs(e - base.e_bar)) +
           dual.l_x * stiffness_derivative(e);
  };
  out.e = solve_strain_branch(g, gp, base.e_bar, opts.trust_radius,
                              residual_tolerance(aux), opts.max_iterations,
                              monotone, "dtp_dynamic");
  return out;
}

DynamicDtpDerivatives dtp_dynamic_derivatives(const DynamicPointDual& dual,
                                              const PointBase& base,
                                              const AuxParams& aux,
                                              double e_hat) {
  const double slope = aux.c_e * (1.0 + 2.0 * std::abs(e_hat - base.e_bar)) +
                       dual.l_x * stiffness_derivative(e_hat);
  if (std::abs(slope) < 1e-12 * aux.c_e) {
    throw DtpError(DtpError::Kind::SingularDerivative,
                   "dtp_dynamic_derivatives: strain equation slope ~ 0");
  }
  DynamicDtpDerivatives d;
  d.dv_dl_t = aux.rho0 / aux.c_v;
  d.dv_dp_x = -1.0 / aux.c_v;
  d.de_dp_t = 1.0 / slope;
  d.de_dl_x = -stiffness(e_hat) / slope;
  return d;
}

}  // namespace dve
