#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "dve/material.hpp"
#include "dve/rng.hpp"

using namespace dve;

namespace {

// Independent energy for the finite-difference stress oracle.
double svk_energy(const Eigen::MatrixXd& F, const SvkParams& p) {
  const int d = p.dim;
  const Eigen::MatrixXd E =
      0.5 * (F.transpose() * F - Eigen::MatrixXd::Identity(d, d));
  return p.shear * E.squaredNorm() + 0.5 * p.lame * E.trace() * E.trace();
}

Eigen::MatrixXd random_matrix(Rng& rng, int d, double scale) {
  Eigen::MatrixXd M(d, d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) M(r, c) = scale * rng.normal();
  }
  return M;
}

Eigen::MatrixXd random_rotation(Rng& rng, int d) {
  const Eigen::MatrixXd M = random_matrix(rng, d, 1.0);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
  Eigen::MatrixXd Q = qr.householderQ();
  if (Q.determinant() < 0.0) Q.col(0) *= -1.0;
  return Q;
}

}  // namespace

TEST_CASE("double-well energy wells and barrier") {
  CHECK(energy_density(1.0) == doctest::Approx(1.0));
  CHECK(energy_density(0.0) == doctest::Approx(0.0));
  CHECK(energy_density(2.0) == doctest::Approx(0.0));
  CHECK(energy_density(0.5) == doctest::Approx(0.5625));
}

TEST_CASE("stress vanishes at wells and barrier") {
  CHECK(stress(0.0) == doctest::Approx(0.0));
  CHECK(stress(1.0) == doctest::Approx(0.0));
  CHECK(stress(2.0) == doctest::Approx(0.0));
}

TEST_CASE("grain strains carry a common stress") {
  // The three-phase equilibrium strains all sit near stress 0.768.
  const double s1 = stress(0.115);
  const double s2 = stress(0.8);
  const double s3 = stress(2.085);
  CHECK(s1 == doctest::Approx(0.76738).epsilon(1e-4));
  CHECK(s2 == doctest::Approx(0.768));
  CHECK(s3 == doctest::Approx(0.76916).epsilon(1e-4));
  CHECK(std::abs(s1 - s2) < 2e-3);
  CHECK(std::abs(s2 - s3) < 2e-3);
  CHECK(std::abs(s1 - s3) < 2e-3);
}

TEST_CASE("stress is the derivative of the energy") {
  const double h = 1e-6;
  for (int i = 0; i <= 400; ++i) {
    const double e = -1.0 + 4.0 * i / 400.0;
    const double fd =
        (energy_density(e + h) - energy_density(e - h)) / (2.0 * h);
    const double denom = std::max(1.0, std::abs(stress(e)));
    CHECK(std::abs(fd - stress(e)) / denom < 1e-6);
  }
}

TEST_CASE("flux is half the stress") {
  CHECK(flux(1.0) == doctest::Approx(0.0));
  CHECK(flux(0.5) == doctest::Approx(0.75));
  for (int i = 0; i <= 100; ++i) {
    const double e = -1.0 + 4.0 * i / 100.0;
    CHECK(flux(e) == doctest::Approx(0.5 * stress(e)).epsilon(1e-14));
  }
}

TEST_CASE("stiffness sign structure") {
  CHECK(stiffness(1.0) == doctest::Approx(-4.0));
  const double root = 1.0 / std::sqrt(3.0);
  CHECK(stiffness(1.0 - root) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(stiffness(1.0 + root) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(stiffness(0.115) == doctest::Approx(5.3987).epsilon(1e-4));
  // Negative exactly on the open interval between the roots.
  for (int i = 0; i <= 400; ++i) {
    const double e = -1.0 + 4.0 * i / 400.0;
    const bool inside = e > 1.0 - root + 1e-9 && e < 1.0 + root - 1e-9;
    const bool outside = e < 1.0 - root - 1e-9 || e > 1.0 + root + 1e-9;
    if (inside) CHECK(stiffness(e) < 0.0);
    if (outside) CHECK(stiffness(e) > 0.0);
  }
}

TEST_CASE("flux derivative and stiffness derivative") {
  for (int i = 0; i <= 100; ++i) {
    const double e = -1.0 + 4.0 * i / 100.0;
    CHECK(flux_derivative(e) ==
          doctest::Approx(0.5 * stiffness(e)).epsilon(1e-14));
  }
  CHECK(stiffness_derivative(1.5) == doctest::Approx(12.0));
}

TEST_CASE("svk stress vanishes at the reference configuration") {
  for (int d : {2, 3}) {
    const SvkParams p{1.3, 0.7, d};
    const Eigen::MatrixXd F = Eigen::MatrixXd::Identity(d, d);
    CHECK(svk_stress(F, p).norm() == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("svk stress matches finite differences of the energy") {
  Rng rng(42);
  const double h = 1e-6;
  for (int d : {2, 3}) {
    const SvkParams p{1.0, 0.5, d};
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::MatrixXd F =
          Eigen::MatrixXd::Identity(d, d) + random_matrix(rng, d, 0.4);
      const Eigen::MatrixXd P = svk_stress(F, p);
      for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
          Eigen::MatrixXd Fp = F, Fm = F;
          Fp(r, c) += h;
          Fm(r, c) -= h;
          const double fd = (svk_energy(Fp, p) - svk_energy(Fm, p)) / (2 * h);
          CHECK(std::abs(fd - P(r, c)) / std::max(1.0, std::abs(P(r, c))) <
                1e-6);
        }
      }
    }
  }
}

TEST_CASE("svk stress is frame indifferent") {
  Rng rng(7);
  for (int d : {2, 3}) {
    const SvkParams p{2.0, -0.4, d};
    REQUIRE(p.valid());
    for (int trial = 0; trial < 25; ++trial) {
      const Eigen::MatrixXd F =
          Eigen::MatrixXd::Identity(d, d) + random_matrix(rng, d, 0.3);
      const Eigen::MatrixXd R = random_rotation(rng, d);
      const Eigen::MatrixXd lhs = svk_stress(R * F, p);
      const Eigen::MatrixXd rhs = R * svk_stress(F, p);
      CHECK((lhs - rhs).norm() < 1e-12 * std::max(1.0, rhs.norm()));
    }
  }
}

TEST_CASE("svk stress vanishes exactly on rotations") {
  Rng rng(11);
  for (int d : {2, 3}) {
    const SvkParams p{1.0, 0.5, d};
    for (int trial = 0; trial < 25; ++trial) {
      const Eigen::MatrixXd R = random_rotation(rng, d);
      CHECK(svk_stress(R, p).norm() < 1e-12);
      // A generic non-isometric gradient must carry stress.
      const Eigen::MatrixXd F =
          R + 0.05 * random_matrix(rng, d, 1.0) +
          0.1 * Eigen::MatrixXd::Identity(d, d);
      if ((F.transpose() * F - Eigen::MatrixXd::Identity(d, d)).norm() >
          1e-3) {
        CHECK(svk_stress(F, p).norm() > 1e-6);
      }
    }
  }
}

TEST_CASE("neo-hookean stress basics") {
  const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
  CHECK((neo_hookean_stress(I, 0.0) - I).norm() == doctest::Approx(0.0));
  CHECK(neo_hookean_stress(I, 1.0).norm() == doctest::Approx(0.0));
}

TEST_CASE("cofactor identity F : cof(F) = 2 det(F)") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::Matrix2d F;
    F << rng.normal(), rng.normal(), rng.normal(), rng.normal();
    const double lhs = F.cwiseProduct(cofactor(F)).sum();
    const double rhs = 2.0 * F.determinant();
    CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("svk params validity") {
  CHECK(SvkParams{1.0, 0.0, 2}.valid());
  CHECK(SvkParams{1.0, -0.9, 2}.valid());
  CHECK_FALSE(SvkParams{1.0, -1.1, 2}.valid());
  CHECK_FALSE(SvkParams{-1.0, 0.0, 2}.valid());
  CHECK_FALSE(SvkParams{1.0, 0.0, 4}.valid());
}
