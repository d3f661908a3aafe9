#include <doctest.h>

#include <cmath>

#include "dve/dtp.hpp"
#include "dve/errors.hpp"
#include "dve/rng.hpp"

using namespace dve;

namespace {

// Plain bisection oracle for the strain equation, independent of the
// production solver.
template <class G>
double bisect(const G& g, double lo, double hi, double tol) {
  double glo = g(lo);
  REQUIRE(glo * g(hi) <= 0.0);
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (std::abs(gm) <= tol) return mid;
    if ((gm > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("zero dual state returns the base state") {
  const AuxParams aux;
  const PointBase base{0.37, 1.21};
  const auto out = dtp_static(StaticPointDual{}, base, aux);
  CHECK(out.u == doctest::Approx(base.u_bar).epsilon(1e-14));
  CHECK(out.e == doctest::Approx(base.e_bar).epsilon(1e-14));

  const auto dyn = dtp_dynamic(DynamicPointDual{}, base, aux);
  CHECK(dyn.u == doctest::Approx(base.u_bar).epsilon(1e-14));
  CHECK(dyn.e == doctest::Approx(base.e_bar).epsilon(1e-14));
}

TEST_CASE("static strain solve matches the bisection oracle") {
  AuxParams aux;
  aux.c_e = 100.0;
  const PointBase base{0.0, 1.0};
  StaticPointDual dual;
  dual.lambda = 11.0;
  const auto g = [&](double e) {
    return static_strain_residual(dual, base, aux, e);
  };
  const double oracle = bisect(g, -4.0, 6.0, 1e-13);
  const auto out = dtp_static(dual, base, aux);
  CHECK(out.e == doctest::Approx(1.1).epsilon(1e-10));
  CHECK(out.e == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("static displacement mapping is closed form") {
  AuxParams aux;
  aux.c_u = 100.0;
  StaticPointDual dual;
  dual.lambda_x = 1.0;
  dual.mu = 1.0;
  const auto out = dtp_static(dual, PointBase{0.0, 1.0}, aux);
  CHECK(out.u == doctest::Approx(0.02).epsilon(1e-14));
}

TEST_CASE("dynamic mapping examples") {
  AuxParams aux;
  aux.c_v = 100.0;
  aux.c_e = 100.0;
  aux.rho0 = 1.0;

  DynamicPointDual dual;
  dual.l_t = 2.0;
  const auto vel = dtp_dynamic(dual, PointBase{0.0, 1.0}, aux);
  CHECK(vel.u == doctest::Approx(0.02).epsilon(1e-14));

  DynamicPointDual strain;
  strain.p_t = 11.0;
  strain.l_x = 0.0;
  const PointBase base{0.0, 1.0};
  const auto g = [&](double e) {
    return dynamic_strain_residual(strain, base, aux, e);
  };
  const double oracle = bisect(g, -4.0, 6.0, 1e-13);
  const auto out = dtp_dynamic(strain, base, aux);
  CHECK(out.e == doctest::Approx(1.1).epsilon(1e-10));
  CHECK(out.e == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("solved points satisfy the mapping equations") {
  Rng rng(17);
  AuxParams aux;
  for (int trial = 0; trial < 200; ++trial) {
    aux.c_e = 50.0 + 200.0 * rng.uniform();
    aux.c_u = 50.0 + 200.0 * rng.uniform();
    const PointBase base{rng.normal(), 1.0 + rng.normal()};
    StaticPointDual dual;
    dual.lambda = 10.0 * rng.normal();
    dual.lambda_x = 10.0 * rng.normal();
    dual.mu = 10.0 * rng.normal();
    dual.mu_x = 0.5 * rng.normal();
    const auto out = dtp_static(dual, base, aux);
    const double tol = 1e-12 * std::max(1.0, aux.c_e);
    CHECK(std::abs(static_strain_residual(dual, base, aux, out.e)) <= tol);
    CHECK(std::abs(-dual.lambda_x - dual.mu +
                   aux.c_u * (out.u - base.u_bar)) <= 1e-12 * aux.c_u);
  }
}

TEST_CASE("implicit derivatives at the base state") {
  AuxParams aux;
  aux.c_e = 100.0;
  aux.c_u = 80.0;
  const PointBase base{0.0, 1.4};
  const auto out = dtp_static(StaticPointDual{}, base, aux);
  const auto d = dtp_static_derivatives(StaticPointDual{}, base, aux, out.e);
  CHECK(d.de_dlambda == doctest::Approx(1.0 / aux.c_e).epsilon(1e-12));
  const double expected =
      (6.0 * (base.e_bar - 1.0) * (base.e_bar - 1.0) - 2.0) / aux.c_e;
  CHECK(d.de_dmu_x == doctest::Approx(expected).epsilon(1e-12));
  CHECK(d.du_dlambda_x == doctest::Approx(1.0 / aux.c_u).epsilon(1e-14));
  CHECK(d.du_dmu == doctest::Approx(1.0 / aux.c_u).epsilon(1e-14));
}

TEST_CASE("implicit derivatives match finite differences") {
  Rng rng(23);
  AuxParams aux;
  const double h = 1e-6;
  int checked = 0;
  while (checked < 100) {
    aux.c_e = 80.0 + 150.0 * rng.uniform();
    aux.c_u = 80.0 + 150.0 * rng.uniform();
    const PointBase base{rng.normal(), 1.0 + 0.8 * rng.normal()};
    StaticPointDual dual;
    dual.lambda = 10.0 * rng.normal();
    dual.lambda_x = 10.0 * rng.normal();
    dual.mu = 10.0 * rng.normal();
    dual.mu_x = 0.5 * rng.normal();

    const auto out = dtp_static(dual, base, aux);
    const auto d = dtp_static_derivatives(dual, base, aux, out.e);

    const auto solve_e = [&](const StaticPointDual& q) {
      return dtp_static(q, base, aux).e;
    };
    const auto solve_u = [&](const StaticPointDual& q) {
      return dtp_static(q, base, aux).u;
    };
    StaticPointDual q = dual;
    q.lambda = dual.lambda + h;
    const double e_plus = solve_e(q);
    q.lambda = dual.lambda - h;
    const double e_minus = solve_e(q);
    const double fd0 = (e_plus - e_minus) / (2.0 * h);
    CHECK(std::abs(fd0 - d.de_dlambda) /
              std::max(1e-8, std::abs(d.de_dlambda)) < 1e-6);

    q = dual;
    q.mu_x = dual.mu_x + h;
    const double ep = solve_e(q);
    q.mu_x = dual.mu_x - h;
    const double em = solve_e(q);
    const double fd1 = (ep - em) / (2.0 * h);
    CHECK(std::abs(fd1 - d.de_dmu_x) <
          1e-6 * std::max(1e-2, std::abs(d.de_dmu_x)));

    q = dual;
    q.lambda_x = dual.lambda_x + h;
    const double up = solve_u(q);
    q.lambda_x = dual.lambda_x - h;
    const double um = solve_u(q);
    CHECK(std::abs((up - um) / (2.0 * h) - d.du_dlambda_x) < 1e-9);
    ++checked;
  }
}

TEST_CASE("dynamic implicit derivatives match finite differences") {
  Rng rng(29);
  AuxParams aux;
  const double h = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    aux.c_e = 80.0 + 150.0 * rng.uniform();
    aux.c_v = 80.0 + 150.0 * rng.uniform();
    aux.rho0 = 0.5 + rng.uniform();
    const PointBase base{rng.normal(), 1.0 + 0.8 * rng.normal()};
    DynamicPointDual dual;
    dual.l_t = 10.0 * rng.normal();
    dual.l_x = 0.4 * rng.normal();
    dual.p_t = 10.0 * rng.normal();
    dual.p_x = 10.0 * rng.normal();

    const auto out = dtp_dynamic(dual, base, aux);
    const auto d = dtp_dynamic_derivatives(dual, base, aux, out.e);

    DynamicPointDual q = dual;
    q.p_t = dual.p_t + h;
    const double ep = dtp_dynamic(q, base, aux).e;
    q.p_t = dual.p_t - h;
    const double em = dtp_dynamic(q, base, aux).e;
    CHECK(std::abs((ep - em) / (2.0 * h) - d.de_dp_t) <
          1e-6 * std::max(1e-2, std::abs(d.de_dp_t)));

    q = dual;
    q.l_x = dual.l_x + h;
    const double lp = dtp_dynamic(q, base, aux).e;
    q.l_x = dual.l_x - h;
    const double lm = dtp_dynamic(q, base, aux).e;
    CHECK(std::abs((lp - lm) / (2.0 * h) - d.de_dl_x) <
          1e-5 * std::max(1e-2, std::abs(d.de_dl_x)));

    CHECK(d.dv_dl_t == doctest::Approx(aux.rho0 / aux.c_v));
    CHECK(d.dv_dp_x == doctest::Approx(-1.0 / aux.c_v));
  }
}

TEST_CASE("mapping is Lipschitz near the zero dual state") {
  AuxParams aux;
  const PointBase base{0.2, 0.9};
  const double bound = std::max(1.0 / aux.c_u, 2.0 / aux.c_e);
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const double delta = 1e-3 * (0.1 + rng.uniform());
    StaticPointDual dual;
    dual.lambda = delta * rng.normal();
    dual.lambda_x = delta * rng.normal();
    dual.mu = delta * rng.normal();
    dual.mu_x = delta * rng.normal();
    const double size = std::max({std::abs(dual.lambda),
                                  std::abs(dual.lambda_x),
                                  std::abs(dual.mu), std::abs(dual.mu_x)});
    const auto out = dtp_static(dual, base, aux);
    const double moved =
        std::max(std::abs(out.u - base.u_bar), std::abs(out.e - base.e_bar));
    CHECK(moved <= 4.0 * bound * size + 1e-14);
  }
}

TEST_CASE("bracket failure raises NoBracket") {
  AuxParams aux;
  aux.c_e = 1e-3;  // far too soft for this dual load
  StaticPointDual dual;
  dual.lambda = 1e3;
  CHECK_THROWS_AS(dtp_static(dual, PointBase{0.0, 1.0}, aux), DtpError);
  try {
    dtp_static(dual, PointBase{0.0, 1.0}, aux);
  } catch (const DtpError& err) {
    CHECK(err.kind() == DtpError::Kind::NoBracket);
  }
}

TEST_CASE("folded branch raises NonMonotone") {
  // With mu_x = -0.5, c_e = 1, e_bar = 0 the strain equation reads
  // 4 e^2 - 5 e + (2 - lambda) for e > 0; lambda = 1.9 puts the nearest
  // root at e ~ 0.0204 where the slope is negative: the branch through the
  // base state has folded.
  AuxParams aux;
  aux.c_e = 1.0;
  StaticPointDual dual;
  dual.mu_x = -0.5;
  dual.lambda = 1.9;
  bool saw_nonmonotone = false;
  try {
    dtp_static(dual, PointBase{0.0, 0.0}, aux);
  } catch (const DtpError& err) {
    saw_nonmonotone = err.kind() == DtpError::Kind::NonMonotone;
  }
  CHECK(saw_nonmonotone);
}

TEST_CASE("singular derivative is reported") {
  AuxParams aux;
  aux.c_e = 1.0;
  // Slope -12 (e-1) mu_x + c_e (1 + 2|e - e_bar|) vanishes at e = e_bar = 2
  // when 12 mu_x = c_e.
  StaticPointDual dual;
  dual.mu_x = 1.0 / 12.0;
  CHECK_THROWS_AS(
      dtp_static_derivatives(dual, PointBase{0.0, 2.0}, aux, 2.0), DtpError);
}
