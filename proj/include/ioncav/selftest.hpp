#pragma once

// Quick oracle and invariant checks bundled with the command-line tool.

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "ioncav/cavity_model.hpp"
#include "ioncav/ion_model.hpp"
#include "ioncav/lineshape.hpp"
#include "ioncav/photometrics.hpp"
#include "ioncav/racah.hpp"
#include "ioncav/resonator.hpp"
#include "ioncav/steadystate.hpp"
#include "ioncav/trapchar.hpp"
#include "ioncav/units.hpp"

namespace ioncav {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Steady state of a bare two-level atom (ground, excited) with decay gamma.
inline double two_level_excited_population(double omega, double delta, double gamma) {
  const SpaceLayout layout{2};
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = delta;
  h(0, 1) = h(1, 0) = -0.5 * omega;
  Matrix lower = Matrix::Zero(2, 2);
  lower(0, 1) = std::sqrt(gamma);
  const std::vector<Operator> c{Operator(layout, lower)};
  const Liouvillian l = build_liouvillian(Operator(layout, h), c);
  return solve_steady(l).rho(1, 1).real();
}

namespace detail {

inline CheckResult run_check(const std::string& name, const std::function<std::string(bool&)>& body) {
  CheckResult r{name, false, ""};
  try {
    r.detail = body(r.passed);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("threw: ") + e.what();
  }
  return r;
}

inline std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

}  // namespace detail

inline std::vector<CheckResult> run_selftest() {
  std::vector<CheckResult> out;
  using detail::sci;

  out.push_back(detail::run_check("cg matches Racah formula", [](bool& ok) {
    double worst = 0.0;
    for (int ms : {-1, 1})
      for (int q = -1; q <= 1; ++q)
        for (int mp : {-1, 1})
          worst = std::max(worst, std::abs(cg_coeff(ms, q, mp) - racah_cg(2, 2 * q, 1, ms, 1, mp)));
    ok = worst <= 1e-12;
    return "max deviation " + sci(worst);
  }));

  out.push_back(detail::run_check("cg sum rule per excited state", [](bool& ok) {
    double worst = 0.0;
    for (int mp : {-1, 1}) {
      double s = 0.0;
      for (int ms : {-1, 1})
        for (int q = -1; q <= 1; ++q) s += cg_coeff(ms, q, mp) * cg_coeff(ms, q, mp);
      worst = std::max(worst, std::abs(s - 1.0));
    }
    ok = worst <= 1e-12;
    return "max |sum - 1| " + sci(worst);
  }));

  out.push_back(detail::run_check("two-level Bloch steady state", [](bool& ok) {
    const double gamma = units::angular(19.6e6);
    double worst = 0.0;
    for (double o : {0.1, 0.7071, 2.0, 10.0})
      for (double d : {-3.0, 0.0, 0.5, 4.0}) {
        const double pe = two_level_excited_population(o * gamma, d * gamma, gamma);
        worst = std::max(worst, std::abs(pe - bloch_two_level(o * gamma, d * gamma, gamma)));
      }
    ok = worst <= 1e-8;
    return "max |dP_e| " + sci(worst);
  }));

  SystemParams p;
  p.gamma = units::angular(19.6e6);
  p.delta_0 = units::angular(10e6);
  p.zeeman = {units::angular(1e6), units::angular(1e6 / 3.0)};
  p.cavity = {units::angular(3.92e6) / std::sqrt(2.0), units::angular(23.7e6), units::angular(50e6), 2};
  p.i_rel = 150.0;
  p.geometry = {units::deg_to_rad(45.0), units::deg_to_rad(35.0)};

  out.push_back(detail::run_check("Liouvillian preserves trace", [&](bool& ok) {
    const SystemModel m = build_system(p);
    const Liouvillian l = build_liouvillian(m.hamiltonian, m.collapse);
    const auto d = static_cast<Eigen::Index>(l.dim());
    const Vector id = vec(Matrix::Identity(d, d));
    const double err = (id.adjoint() * l.matrix).norm() / detail::norm1(l.matrix);
    ok = err <= 1e-12;
    return "relative |vec(I)^T L| " + sci(err);
  }));

  out.push_back(detail::run_check("steady-state invariants", [&](bool& ok) {
    const SteadyStateResult r = solve_system(p);
    const double tr = std::abs(r.rho.trace() - 1.0);
    const double herm = r.rho.hermiticity_error();
    ok = tr < 1e-9 && herm < 1e-10 && r.min_eigenvalue > -1e-10 && r.residual < 1e-8;
    return "trace err " + sci(tr) + ", herm " + sci(herm) + ", min eig " + sci(r.min_eigenvalue) +
           ", residual " + sci(r.residual);
  }));

  out.push_back(detail::run_check("cavity finesse", [](bool& ok) {
    CavityInputs in;
    in.fsr = 70.5e9;
    in.fwhm = 47.4e6;
    const CavityMetrics m = cavity_metrics(in);
    ok = std::abs(m.finesse / 1490.0 - 1.0) < 0.01 && std::abs(m.length / 2.126e-3 - 1.0) < 0.005;
    return "finesse " + sci(m.finesse) + ", length " + sci(m.length) + " m";
  }));

  out.push_back(detail::run_check("saturation intensity", [](bool& ok) {
    const double isat = saturation_intensity(369.5e-9, units::angular(19.6e6)) * 0.1;  // mW/cm^2
    ok = std::abs(isat / 50.7 - 1.0) < 0.01;
    return sci(isat) + " mW/cm^2";
  }));

  out.push_back(detail::run_check("dual-band length difference", [](bool& ok) {
    const MirrorGeometry g{2.126e-3, 2.126e-3, 25e-3, 25e-3, units::speed_of_light / 739e-9};
    const double dl = length_diff_from_offset(2.3e9, g);
    ok = std::abs(std::abs(dl) / 12e-9 - 1.0) < 0.1;
    return "dL " + sci(dl * 1e9) + " nm";
  }));

  out.push_back(detail::run_check("trap eta round trip", [](bool& ok) {
    const TrapDrive drive{300.0, units::angular(21.6e6), 174.0 * units::atomic_mass_unit};
    const QuadrupoleMoments q = quadrupole_from_eta(0.45, 90e-6, 0.5);
    std::vector<TrapMeasurement> data;
    for (TrapAxis a : {TrapAxis::x, TrapAxis::y})
      for (double u : {-20.0, 0.0, 20.0})
        data.push_back({u, 180e-6, a, secular_frequency(u, drive.v0, drive.omega_rf, q[a], drive.mass)});
    const EtaFitReport rep = fit_eta(data, drive);
    const double err = std::abs(rep.fits.at(0).eta / 0.45 - 1.0);
    ok = err < 1e-6;
    return "relative eta error " + sci(err);
  }));

  return out;
}

}  // namespace ioncav
