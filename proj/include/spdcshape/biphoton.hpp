#pragma once

#include <cmath>
#include <complex>
#include <optional>

#include "spdcshape/crystal.hpp"
#include "spdcshape/units.hpp"

namespace spdcshape {

/*!
 * Pump beam description.
 *
 * Spatial field exp(-|x|^2 / w0^2), so the transverse-wavevector amplitude is
 * exp(-|P|^2 w0^2 / 4). The spectral amplitude is a Gaussian in angular
 * frequency whose *intensity* has the configured FWHM; a zero bandwidth means a
 * monochromatic pump and a spectral factor of exactly 1.
 */
struct PumpConfig {
  double wavelength = 405e-9;   // central vacuum wavelength [m]
  double w0 = 500e-6;           // 1/e^2 intensity waist radius [m]
  double bandwidth_fwhm = 0.0;  // spectral intensity FWHM in wavelength [m]
  double amplitude = 1.0;       // peak field amplitude (arbitrary units)

  double central_omega() const { return angular_frequency(wavelength); }
  // FWHM in angular frequency, linearised about the centre: 2 pi c dl / l0^2.
  double bandwidth_fwhm_omega() const { return 2.0 * kPi * kSpeedOfLight * bandwidth_fwhm / (wavelength * wavelength); }
  bool monochromatic() const { return bandwidth_fwhm == 0.0; }
  void validate() const;
};

struct Geometry {
  CrystalConfig crystal;
  double signal_wavelength = 810e-9;  // central, m
  double idler_wavelength = 810e-9;   // central, m

  double signal_omega() const { return angular_frequency(signal_wavelength); }
  double idler_omega() const { return angular_frequency(idler_wavelength); }
};

struct PhaseMismatch {
  double delta_k = 0.0;  // longitudinal (z) mismatch [rad/m]
  double delta_0 = 0.0;  // transverse (y) mismatch [rad/m]
};

struct BiphotonEvaluation {
  std::complex<double> phi;
  double delta_k = 0.0;
  double delta_0 = 0.0;
};

/// sin(x)/x with sinc(0) = 1; uses the Taylor series near zero.
inline double sinc(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
  }
  return std::sin(x) / x;
}

// Spectral amplitude factor of the pump at omega_p (1 at the centre, 1 for a monochromatic pump).
double pump_spectral_amplitude(const PumpConfig& pump, double omega_p);

// E0(omega_p, arg.x, arg.y), with arg = (p_x + q_x, Delta_0) in the mode function.
std::complex<double> pump_envelope(const PumpConfig& pump, double omega_p, Wavevector arg);

// Both mismatches; nullopt when any of the three waves is evanescent.
std::optional<PhaseMismatch> phase_mismatch(const Geometry& geom, double omega_s, double omega_i, Wavevector p,
                                            Wavevector q);

// Throw ErrorKind::evanescent outside the propagation cone.
double delta_k(const Geometry& geom, double omega_s, double omega_i, Wavevector p, Wavevector q);
double delta_0(const Geometry& geom, double omega_s, double omega_i, Wavevector p, Wavevector q);

/*!
 * Two-photon mode function
 *
 *   Phi = E0(ws + wi, p_x + q_x, Delta_0) sinc(Delta_k L / 2) exp(-i Delta_k L / 2).
 *
 * Refractive indices follow the dispersion model at the running frequencies.
 * Evanescent arguments give Phi = 0.
 */
BiphotonEvaluation mode_function(const Geometry& geom, const PumpConfig& pump, double omega_s, double omega_i,
                                 Wavevector p, Wavevector q);

// L -> 0 limit at the central frequencies: the pump transverse spectrum at
// (p_x + q_x, p_y cos phi1 + q_y cos phi2).
std::complex<double> mode_function_thin_crystal(const Geometry& geom, const PumpConfig& pump, Wavevector p,
                                                Wavevector q);

namespace detail {

// omega n(omega) / c for the three waves.
struct FreeWavenumbers {
  double pump = 0.0;
  double signal = 0.0;
  double idler = 0.0;
};

FreeWavenumbers free_wavenumbers(const Geometry& geom, double omega_s, double omega_i);

// A downconverted photon expressed in the pump frame: transverse x, and the
// y and z projections of its wavevector (the per-arm pieces of Delta_0 and
// Delta_k).
struct ArmProjection {
  double tx = 0.0;
  double along_y = 0.0;  // t_y cos(phi) - k sin(phi)
  double along_z = 0.0;  // k cos(phi) + t_y sin(phi)
  bool propagating = false;
};

inline ArmProjection project_arm(double k_free, Wavevector t, double cos_phi, double sin_phi) {
  const double arg = k_free * k_free - (t.x * t.x + t.y * t.y);
  if (!(arg >= 0.0)) return {};
  const double k = std::sqrt(arg);
  return {t.x, t.y * cos_phi - k * sin_phi, k * cos_phi + t.y * sin_phi, true};
}

inline std::optional<PhaseMismatch> combine_arms(double kp_free, const ArmProjection& s, const ArmProjection& i) {
  if (!s.propagating || !i.propagating) return std::nullopt;
  const double d0 = s.along_y + i.along_y;
  const double sum_x = s.tx + i.tx;
  const double arg = kp_free * kp_free - sum_x * sum_x - d0 * d0;
  if (!(arg >= 0.0)) return std::nullopt;
  return PhaseMismatch{std::sqrt(arg) - s.along_z - i.along_z, d0};
}

// |Phi|^2 from its pieces. `spectral_intensity` already contains the pump
// amplitude squared; `w0_sq_half` = w0^2 / 2.
inline double pair_intensity(double spectral_intensity, double w0_sq_half, double half_length, double sum_x,
                             const PhaseMismatch& m) {
  const double s = sinc(m.delta_k * half_length);
  return spectral_intensity * std::exp(-(sum_x * sum_x + m.delta_0 * m.delta_0) * w0_sq_half) * (s * s);
}

}  // namespace detail
}  // namespace spdcshape
