#pragma once

#include <numbers>

namespace ioncav::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// CODATA 2018 exact / recommended values, SI.
inline constexpr double speed_of_light = 299792458.0;        // m/s
inline constexpr double hbar = 1.054571817e-34;              // J s
inline constexpr double elementary_charge = 1.602176634e-19; // C
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg

/// Linear frequency (Hz) to angular frequency (rad/s).
constexpr double angular(double hz) noexcept { return two_pi * hz; }
/// Angular frequency (rad/s) to linear frequency (Hz).
constexpr double linear(double rad_per_s) noexcept { return rad_per_s / two_pi; }

constexpr double deg_to_rad(double deg) noexcept { return deg * pi / 180.0; }
constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / pi; }

}  // namespace ioncav::units
