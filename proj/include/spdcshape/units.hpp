#pragma once

#include <numbers>

namespace spdcshape {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = std::numbers::pi;

/// Angular frequency [rad/s] of light with vacuum wavelength `lambda` [m].
constexpr double angular_frequency(double lambda) { return 2.0 * kPi * kSpeedOfLight / lambda; }

/// Vacuum wavelength [m] of light with angular frequency `omega` [rad/s].
constexpr double vacuum_wavelength(double omega) { return 2.0 * kPi * kSpeedOfLight / omega; }

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Transverse wavevector [rad/m].
struct Wavevector {
  double x = 0.0;
  double y = 0.0;
};

/// Transverse position in a detector plane [m].
struct Position {
  double x = 0.0;
  double y = 0.0;
};

}  // namespace spdcshape
