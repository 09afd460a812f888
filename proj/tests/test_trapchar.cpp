#include <gtest/gtest.h>

#include <random>

#include "ioncav/trapchar.hpp"

using namespace ioncav;

namespace {

const TrapDrive drive{300.0, units::angular(21.6e6), 174.0 * units::atomic_mass_unit};

std::vector<TrapMeasurement> synthetic(double eta, double r, double noise, unsigned seed,
                                       std::vector<double> separations = {180e-6}) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n(0.0, noise);
  std::vector<TrapMeasurement> out;
  for (double sep : separations) {
    const QuadrupoleMoments q = quadrupole_from_eta(eta, 0.5 * sep, r);
    for (TrapAxis a : {TrapAxis::x, TrapAxis::y})
      for (double u : {-20.0, -10.0, 0.0, 10.0, 20.0}) {
        const double w = secular_frequency(u, drive.v0, drive.omega_rf, q[a], drive.mass);
        out.push_back({u, sep, a, w * (1.0 + n(rng))});
      }
  }
  return out;
}

}  // namespace

TEST(Quadrupole, Traceless) {
  const QuadrupoleMoments q = quadrupole_from_eta(0.45, 90e-6, 0.3);
  EXPECT_EQ(q.q_x + q.q_y + q.q_z, 0.0);
  EXPECT_NEAR(q.q_x, 0.45 / (90e-6 * 90e-6), 1e-3);
  EXPECT_THROW(quadrupole_from_eta(0.45, 90e-6, 1.5), DomainError);
}

TEST(Secular, RfOnlyFrequency) {
  // omega = e V0 q / (sqrt2 m Omega) with no bias
  const QuadrupoleMoments q = quadrupole_from_eta(0.45, 90e-6, 0.5);
  const double w = secular_frequency(0.0, drive.v0, drive.omega_rf, q.q_x, drive.mass);
  EXPECT_NEAR(w, units::elementary_charge * drive.v0 * q.q_x / (std::sqrt(2.0) * drive.mass * drive.omega_rf),
              1e-6);
  EXPECT_NEAR(units::linear(w), 7.66e6, 0.01e6);
}

TEST(Secular, InstabilityBeyondThreshold) {
  const QuadrupoleMoments q = quadrupole_from_eta(0.45, 90e-6, 0.5);
  const double u_th = instability_threshold(drive.v0, drive.omega_rf, q.q_y, drive.mass);
  EXPECT_GT(u_th, 0.0);
  const double rf = secular_radicand(0.0, drive.v0, drive.omega_rf, q.q_y, drive.mass);
  EXPECT_NEAR(secular_radicand(u_th, drive.v0, drive.omega_rf, q.q_y, drive.mass) / rf, 0.0, 1e-12);
  try {
    secular_frequency(1.01 * u_th, drive.v0, drive.omega_rf, q.q_y, drive.mass);
    FAIL();
  } catch (const InstabilityError& e) {
    EXPECT_LT(e.radicand(), 0.0);
  }
  EXPECT_THROW(instability_threshold(drive.v0, drive.omega_rf, 0.0, drive.mass), DomainError);
}

TEST(FitEta, ExactRoundTrip) {
  const auto rep = fit_eta(synthetic(0.45, 0.4, 0.0, 1), drive);
  ASSERT_EQ(rep.fits.size(), 1u);
  EXPECT_NEAR(rep.fits[0].eta, 0.45, 1e-9);
  EXPECT_NEAR(rep.fits[0].r, 0.4, 1e-9);
  EXPECT_EQ(rep.fits[0].points, 10u);
}

TEST(FitEta, NoisyRoundTripPerSeparation) {
  const auto rep = fit_eta(synthetic(0.45, 0.5, 0.02, 11, {130e-6, 170e-6, 200e-6}), drive);
  ASSERT_EQ(rep.fits.size(), 3u);
  EXPECT_DOUBLE_EQ(rep.fits[0].separation, 130e-6);
  for (const auto& f : rep.fits) EXPECT_NEAR(f.eta / 0.45, 1.0, 0.03);
}

TEST(FitEta, OrderIndependent) {
  auto data = synthetic(0.45, 0.5, 0.01, 5);
  const auto a = fit_eta(data, drive);
  std::reverse(data.begin(), data.end());
  const auto b = fit_eta(data, drive);
  EXPECT_EQ(a.fits[0].eta, b.fits[0].eta);
  EXPECT_EQ(a.fits[0].r, b.fits[0].r);
}

TEST(FitEta, Underdetermined) {
  auto data = synthetic(0.45, 0.5, 0.0, 1);
  std::vector<TrapMeasurement> x_only;
  for (const auto& m : data)
    if (m.axis == TrapAxis::x) x_only.push_back(m);
  EXPECT_THROW(fit_eta(x_only, drive), UnderdeterminedError);
  EXPECT_THROW(fit_eta({}, drive), UnderdeterminedError);
  EXPECT_THROW(fit_eta(data, TrapDrive{0.0, 1.0, 1.0}), DomainError);
}

TEST(FitEta, AxisParsing) {
  EXPECT_EQ(parse_axis("y"), TrapAxis::y);
  EXPECT_STREQ(to_string(TrapAxis::z), "z");
  EXPECT_THROW(parse_axis("w"), ConfigError);
}

TEST(Secular, OperatingPointWithinFactorTwoOfQuotedScale) {
  // the quoted secular frequency scale is 4 MHz; voltage convention is unstated
  const QuadrupoleMoments q = quadrupole_from_eta(0.45, 90e-6, 0.5);
  const double fx = units::linear(secular_frequency(0.0, drive.v0, drive.omega_rf, q.q_x, drive.mass));
  EXPECT_GE(fx, 2e6);
  EXPECT_LE(fx, 8e6);
}
