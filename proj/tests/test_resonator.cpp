#include <gtest/gtest.h>

#include "ioncav/resonator.hpp"

using namespace ioncav;

namespace {
MirrorGeometry reference() {
  return {2.126e-3, 2.126e-3, 25e-3, 25e-3, units::speed_of_light / 739e-9};
}
}  // namespace

TEST(Gouy, PhaseValues) {
  EXPECT_NEAR(gouy_phase(2.126e-3, 25e-3), std::acos(1.0 - 2.126 / 25.0), 1e-15);
  EXPECT_NEAR(gouy_phase(25e-3, 25e-3), units::pi / 2, 1e-15);
  EXPECT_THROW(gouy_phase(51e-3, 25e-3), DomainError);
  EXPECT_THROW(gouy_phase(1e-3, 0.0), DomainError);
}

TEST(Gouy, DerivativeMatchesFiniteDifference) {
  const double l = 2.126e-3, r = 25e-3, h = 1e-9;
  const double fd = (gouy_phase(l + h, r) - gouy_phase(l - h, r)) / (2 * h);
  EXPECT_NEAR(gouy_phase_derivative(l, r) / fd, 1.0, 1e-6);
}

TEST(Resonance, PlanarLimitAndSpacing) {
  const double l = 2.126e-3;
  EXPECT_NEAR(resonance_frequency(10, l, INFINITY), 10 * units::speed_of_light / (2 * l), 1e-3);
  const double fsr = resonance_frequency(11, l, 25e-3) - resonance_frequency(10, l, 25e-3);
  EXPECT_NEAR(fsr, units::speed_of_light / (2 * l), 1e-3);
  EXPECT_THROW(resonance_frequency(0, l, 25e-3), DomainError);
}

TEST(DualBand, OffsetFromModeFrequencies) {
  // nu_ir - nu_uv/2 for exact mode numbers at equal lengths is the Gouy term
  const MirrorGeometry g = reference();
  const double l = g.l_uv;
  const double gouy = units::speed_of_light / (units::two_pi * l) *
                      (gouy_phase(l, g.r_ir) - 0.5 * gouy_phase(l, g.r_uv));
  EXPECT_NEAR(dual_band_offset(g), gouy, 1e-3);
  const int q = 5000;
  const double nu_ir = resonance_frequency(q, l, g.r_ir);
  const double nu_uv = resonance_frequency(2 * q, l, g.r_uv);
  MirrorGeometry g2 = g;
  g2.nu_ir = nu_ir;
  EXPECT_NEAR(nu_ir - 0.5 * nu_uv, dual_band_offset(g2), 1.0);
}

TEST(DualBand, LengthDifferenceRoundTrip) {
  const MirrorGeometry g = reference();
  const double dl = length_diff_from_offset(2.3e9, g);
  EXPECT_NEAR(std::abs(dl), 12.33e-9, 0.05e-9);
  MirrorGeometry g2 = g;
  g2.l_ir = g.l_uv - dl;
  EXPECT_NEAR(dual_band_offset(g2), 2.3e9, 1e3);  // linearization error only
}

TEST(DualBand, SlopeIncludesGouyDerivative) {
  const MirrorGeometry g = reference();
  const double h = 1e-12;
  MirrorGeometry a = g, b = g;
  a.l_ir = g.l_uv - h;
  b.l_ir = g.l_uv + h;
  const double fd = (dual_band_offset(b) - dual_band_offset(a)) / (2 * h);  // d offset / d l_ir
  const double analytic = -(g.nu_ir / g.l_uv -
                            units::speed_of_light / (units::two_pi * g.l_uv) *
                                gouy_phase_derivative(g.l_uv, g.r_ir));
  EXPECT_NEAR(fd / analytic, 1.0, 1e-6);
  EXPECT_NEAR(fd / (-g.nu_ir / g.l_uv), 1.0, 1e-4);
}

TEST(MirrorGeometry, Validation) {
  MirrorGeometry g = reference();
  g.r_uv = 1e-3;
  EXPECT_THROW(dual_band_offset(g), DomainError);
  g = reference();
  g.nu_ir = 0.0;
  EXPECT_THROW(length_diff_from_offset(1e9, g), DomainError);
}
