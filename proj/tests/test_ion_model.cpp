#include <gtest/gtest.h>

#include "ioncav/ion_model.hpp"
#include "ioncav/racah.hpp"

using namespace ioncav;

TEST(ClebschGordan, MatchesRacahFormula) {
  for (int ms : {-1, 1})
    for (int q = -1; q <= 1; ++q)
      for (int mp : {-1, 1})
        EXPECT_NEAR(cg_coeff(ms, q, mp), racah_cg(2, 2 * q, 1, ms, 1, mp), 1e-12)
            << "ms=" << ms << " q=" << q << " mp=" << mp;
}

TEST(ClebschGordan, KnownValues) {
  const double r13 = std::sqrt(1.0 / 3.0), r23 = std::sqrt(2.0 / 3.0);
  EXPECT_NEAR(std::abs(cg_coeff(-1, 0, -1)), r13, 1e-15);
  EXPECT_NEAR(std::abs(cg_coeff(1, 0, 1)), r13, 1e-15);
  EXPECT_NEAR(std::abs(cg_coeff(-1, 1, 1)), r23, 1e-15);
  EXPECT_NEAR(std::abs(cg_coeff(1, -1, -1)), r23, 1e-15);
  // pi components have opposite signs for the two ground states
  EXPECT_LT(cg_coeff(-1, 0, -1) * cg_coeff(1, 0, 1), 0.0);
}

TEST(ClebschGordan, SelectionRules) {
  for (int ms : {-1, 1})
    for (int q = -1; q <= 1; ++q)
      for (int mp : {-1, 1})
        if (mp != ms + 2 * q) EXPECT_EQ(cg_coeff(ms, q, mp), 0.0);
  EXPECT_THROW(cg_coeff(0, 0, 1), DomainError);
  EXPECT_THROW(cg_coeff(1, 2, 1), DomainError);
}

TEST(ClebschGordan, SumRules) {
  for (int mp : {-1, 1}) {
    double s = 0.0;
    for (int ms : {-1, 1})
      for (int q = -1; q <= 1; ++q) s += cg_coeff(ms, q, mp) * cg_coeff(ms, q, mp);
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
  // each ground state couples to the manifold with total strength 1 as well
  for (int ms : {-1, 1}) {
    double s = 0.0;
    for (int q = -1; q <= 1; ++q)
      for (int mp : {-1, 1}) s += cg_coeff(ms, q, mp) * cg_coeff(ms, q, mp);
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(Racah, GeneralValues) {
  // <1/2 1/2; 1/2 -1/2 | 1 0> = 1/sqrt2, <1 1; 1 -1 | 0 0> = 1/sqrt3
  EXPECT_NEAR(racah_cg(1, 1, 1, -1, 2, 0), std::sqrt(0.5), 1e-14);
  EXPECT_NEAR(racah_cg(1, 1, 1, -1, 0, 0), std::sqrt(0.5), 1e-14);
  EXPECT_NEAR(racah_cg(2, 2, 2, -2, 0, 0), std::sqrt(1.0 / 3.0), 1e-14);
  EXPECT_EQ(racah_cg(2, 2, 2, 2, 0, 0), 0.0);
}

TEST(LoweringOperators, SumOverComponentsGivesUnitDecay) {
  const auto a = lowering_operators();
  Matrix s = Matrix::Zero(4, 4);
  for (const auto& op : a) s += op.matrix().adjoint() * op.matrix();
  Matrix expected = Matrix::Zero(4, 4);
  expected(2, 2) = expected(3, 3) = 1.0;
  EXPECT_LT((s - expected).norm(), 1e-14);
}

TEST(SphericalComponents, PreserveNorm) {
  const PolVector e = PolVector::normalized(0.3, Complex(0.2, -0.5), 0.7);
  EXPECT_NEAR(spherical_components(e).norm2(), 1.0, 1e-14);
  const auto z = spherical_components(PolVector::z_hat());
  EXPECT_NEAR(std::abs(z[0]), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(z[1]), 0.0, 1e-15);
}

TEST(PolVector, RejectsNonUnit) {
  EXPECT_THROW(PolVector(1.0, 1.0, 0.0), DomainError);
  EXPECT_THROW(PolVector::normalized(0.0, 0.0, 0.0), DomainError);
}

TEST(DrivePolarization, TransverseAndUnit) {
  for (double th : {0.0, 0.3, units::pi / 4, units::pi / 2, 2.5, units::pi})
    for (double ps : {0.0, 0.6, units::pi / 2, 3.0}) {
      const DriveGeometry g{th, ps};
      const PolVector e = drive_polarization(g);
      const auto k = drive_direction(g);
      const Complex dot = e.x() * k[0] + e.y() * k[1] + e.z() * k[2];
      EXPECT_LT(std::abs(dot), 1e-14);
      EXPECT_NEAR(std::norm(e.x()) + std::norm(e.y()) + std::norm(e.z()), 1.0, 1e-14);
    }
}

TEST(DrivePolarization, GeometryConvention) {
  // along z with psi = 0 the polarization is the cavity axis x
  const PolVector e0 = drive_polarization({0.0, 0.0});
  EXPECT_NEAR(e0.x().real(), 1.0, 1e-15);
  // psi = 90 deg along z gives y
  const PolVector e1 = drive_polarization({0.0, units::pi / 2});
  EXPECT_NEAR(std::abs(e1.y()), 1.0, 1e-14);
  // beam along x falls back to a y reference; psi rotates it towards z
  const PolVector e2 = drive_polarization({units::pi / 2, 0.0});
  EXPECT_NEAR(std::abs(e2.y()), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(drive_polarization({units::pi / 2, units::pi / 2}).z()), 1.0, 1e-14);
  const PolVector e3 = drive_polarization({units::deg_to_rad(45.0), units::deg_to_rad(35.0)});
  EXPECT_NEAR(std::abs(e3.x()), std::cos(units::deg_to_rad(45.0)) * std::cos(units::deg_to_rad(35.0)),
              1e-14);
}

TEST(DriveGeometry, Validation) {
  EXPECT_THROW(drive_polarization({-0.1, 0.0}), DomainError);
  EXPECT_THROW(drive_polarization({0.1, units::pi}), DomainError);
}

TEST(AtomHamiltonian, DiagonalEnergies) {
  const Operator h = build_h_atom(5.0, {1.0, 0.25});
  EXPECT_DOUBLE_EQ(h(0, 0).real(), -1.0);
  EXPECT_DOUBLE_EQ(h(1, 1).real(), 1.0);
  EXPECT_DOUBLE_EQ(h(2, 2).real(), 4.75);
  EXPECT_DOUBLE_EQ(h(3, 3).real(), 5.25);
  EXPECT_THROW(build_h_atom(0.0, {-1.0, 0.0}), DomainError);
}

TEST(DriveHamiltonian, HermitianWithCgWeights) {
  const double omega = 2.0;
  const Operator h = build_h_drive(omega, PolVector::z_hat());
  EXPECT_TRUE(h.is_hermitian(1e-15));
  // pi light couples |S,m> <-> |P,m> with amplitude Omega/2 * 1/sqrt3
  EXPECT_NEAR(std::abs(h(0, 2)), 0.5 * omega / std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(std::abs(h(1, 3)), 0.5 * omega / std::sqrt(3.0), 1e-14);
  EXPECT_EQ(std::abs(h(0, 3)), 0.0);
  EXPECT_EQ(std::abs(h(0, 1)), 0.0);
}

TEST(RabiFrequency, FromIntensity) {
  EXPECT_NEAR(rabi_from_intensity(2.0, 3.0), 3.0, 1e-15);
  EXPECT_NEAR(rabi_from_intensity(600.0, 1.0), std::sqrt(300.0), 1e-12);
  EXPECT_THROW(rabi_from_intensity(-1.0, 1.0), DomainError);
}
