#include "spdcshape/biphoton.hpp"

#include <numbers>

#include "spdcshape/error.hpp"

namespace spdcshape {

void PumpConfig::validate() const {
  if (!(wavelength > 0.0)) throw Error(ErrorKind::config, "pump wavelength must be positive");
  if (!(w0 > 0.0)) throw Error(ErrorKind::config, "pump waist w0 must be positive");
  if (!(bandwidth_fwhm >= 0.0)) throw Error(ErrorKind::config, "pump bandwidth must be >= 0");
  if (!std::isfinite(amplitude)) throw Error(ErrorKind::config, "pump amplitude must be finite");
}

double pump_spectral_amplitude(const PumpConfig& pump, double omega_p) {
  if (pump.monochromatic()) return 1.0;
  const double fwhm = pump.bandwidth_fwhm_omega();
  const double d = (omega_p - pump.central_omega()) / fwhm;
  return std::exp(-2.0 * std::numbers::ln2 * d * d);
}

std::complex<double> pump_envelope(const PumpConfig& pump, double omega_p, Wavevector arg) {
  const double spatial = std::exp(-(arg.x * arg.x + arg.y * arg.y) * pump.w0 * pump.w0 / 4.0);
  return {pump.amplitude * spatial * pump_spectral_amplitude(pump, omega_p), 0.0};
}

namespace detail {

FreeWavenumbers free_wavenumbers(const Geometry& geom, double omega_s, double omega_i) {
  const double omega_p = omega_s + omega_i;
  const auto& c = geom.crystal;
  return {omega_p * c.pump_dispersion.index(vacuum_wavelength(omega_p)) / kSpeedOfLight,
          omega_s * c.signal_dispersion.index(vacuum_wavelength(omega_s)) / kSpeedOfLight,
          omega_i * c.idler_dispersion.index(vacuum_wavelength(omega_i)) / kSpeedOfLight};
}

}  // namespace detail

std::optional<PhaseMismatch> phase_mismatch(const Geometry& geom, double omega_s, double omega_i, Wavevector p,
                                            Wavevector q) {
  const auto k = detail::free_wavenumbers(geom, omega_s, omega_i);
  const auto& c = geom.crystal;
  const auto s = detail::project_arm(k.signal, p, std::cos(c.phi1), std::sin(c.phi1));
  const auto i = detail::project_arm(k.idler, q, std::cos(c.phi2), std::sin(c.phi2));
  return detail::combine_arms(k.pump, s, i);
}

namespace {

PhaseMismatch require_propagating(const std::optional<PhaseMismatch>& m) {
  if (!m) throw Error(ErrorKind::evanescent, "phase mismatch undefined: a wave is outside its propagation cone");
  return *m;
}

}  // namespace

double delta_k(const Geometry& geom, double omega_s, double omega_i, Wavevector p, Wavevector q) {
  return require_propagating(phase_mismatch(geom, omega_s, omega_i, p, q)).delta_k;
}

double delta_0(const Geometry& geom, double omega_s, double omega_i, Wavevector p, Wavevector q) {
  return require_propagating(phase_mismatch(geom, omega_s, omega_i, p, q)).delta_0;
}

BiphotonEvaluation mode_function(const Geometry& geom, const PumpConfig& pump, double omega_s, double omega_i,
                                 Wavevector p, Wavevector q) {
  const auto m = phase_mismatch(geom, omega_s, omega_i, p, q);
  if (!m) return {{0.0, 0.0}, 0.0, 0.0};
  const double half = m->delta_k * geom.crystal.length / 2.0;
  const auto envelope = pump_envelope(pump, omega_s + omega_i, {p.x + q.x, m->delta_0});
  const auto phi = envelope * sinc(half) * std::polar(1.0, -half);
  return {phi, m->delta_k, m->delta_0};
}

std::complex<double> mode_function_thin_crystal(const Geometry& geom, const PumpConfig& pump, Wavevector p,
                                                Wavevector q) {
  const Wavevector arg{p.x + q.x, p.y * std::cos(geom.crystal.phi1) + q.y * std::cos(geom.crystal.phi2)};
  return pump_envelope(pump, pump.central_omega(), arg);
}

}  // namespace spdcshape
