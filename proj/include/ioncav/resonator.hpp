#pragma once

// Longitudinal resonances of a two-mirror cavity at two wavelengths.

#include <cmath>
#include <string>

#include "ioncav/errors.hpp"
#include "ioncav/units.hpp"

namespace ioncav {

/// Effective lengths (m) and mirror radii (m) seen by the infrared and
/// ultraviolet light; nu_ir in Hz.
struct MirrorGeometry {
  double l_ir = 0.0;
  double l_uv = 0.0;
  double r_ir = 0.0;
  double r_uv = 0.0;
  double nu_ir = 0.0;

  void validate() const {
    if (!(l_ir > 0.0 && l_uv > 0.0 && r_ir > 0.0 && r_uv > 0.0 && nu_ir > 0.0))
      throw DomainError("mirror geometry values must be positive");
    if (l_ir >= 2.0 * r_ir || l_uv >= 2.0 * r_uv)
      throw DomainError("cavity length must be below 2R for a stable cavity");
  }
};

/// arccos(1 - L/R) on 0 <= L <= 2R.
inline double gouy_phase(double length, double radius) {
  if (!(radius > 0.0)) throw DomainError("mirror radius must be positive");
  if (!(length >= 0.0 && length <= 2.0 * radius))
    throw DomainError("length " + std::to_string(length) + " m is outside the stable range [0, 2R]");
  return std::acos(1.0 - length / radius);
}

/// d(phi)/dL = 1 / (R sin phi).
inline double gouy_phase_derivative(double length, double radius) {
  const double phi = gouy_phase(length, radius);
  return 1.0 / (radius * std::sin(phi));
}

/// Frequency (Hz) of the q-th longitudinal mode.
inline double resonance_frequency(int q, double length, double radius) {
  if (q < 1) throw DomainError("mode index q must be >= 1");
  if (!(length > 0.0)) throw DomainError("length must be positive");
  const double phi = std::isinf(radius) ? 0.0 : gouy_phase(length, radius);
  return units::speed_of_light / (2.0 * length) * (q + phi / units::pi);
}

/// nu_ir - nu_uv / 2 for the ultraviolet mode nearest the second harmonic.
inline double dual_band_offset(const MirrorGeometry& g) {
  g.validate();
  const double phi_ir = gouy_phase(g.l_ir, g.r_ir);
  const double phi_uv = gouy_phase(g.l_uv, g.r_uv);
  return g.nu_ir * (g.l_uv - g.l_ir) / g.l_uv +
         units::speed_of_light / (units::two_pi * g.l_uv) * (phi_ir - 0.5 * phi_uv);
}

/// Signed L_uv - L_ir giving offset `delta_f`. Uses l_uv, r_ir, r_uv and
/// nu_ir from `g` (l_ir is the unknown). The infrared Gouy phase is
/// linearized about L_uv.
inline double length_diff_from_offset(double delta_f, const MirrorGeometry& g) {
  MirrorGeometry ref = g;
  ref.l_ir = g.l_uv;
  ref.validate();
  const double c = units::speed_of_light;
  const double gouy = c / (units::two_pi * g.l_uv) *
                      (gouy_phase(g.l_uv, g.r_ir) - 0.5 * gouy_phase(g.l_uv, g.r_uv));
  const double slope = g.nu_ir / g.l_uv -
                       c / (units::two_pi * g.l_uv) * gouy_phase_derivative(g.l_uv, g.r_ir);
  return (delta_f - gouy) / slope;
}

}  // namespace ioncav
