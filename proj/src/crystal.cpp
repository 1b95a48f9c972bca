#include "spdcshape/crystal.hpp"

#include <cmath>
#include <sstream>

#include "spdcshape/error.hpp"

namespace spdcshape {

DispersionModel DispersionModel::constant(double n) {
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorKind::invalid_argument, "constant refractive index must be positive and finite");
  }
  DispersionModel m;
  m.constant_ = true;
  m.a_ = n;
  m.name_ = n == 1.0 ? "vacuum" : "constant";
  return m;
}

DispersionModel DispersionModel::sellmeier(std::string name, Polarization branch, double a, std::vector<Pole> poles,
                                           double d, double min_wavelength, double max_wavelength) {
  if (!(min_wavelength > 0.0) || !(max_wavelength > min_wavelength)) {
    throw Error(ErrorKind::invalid_argument, "Sellmeier validity window must be a nonempty positive interval");
  }
  DispersionModel m;
  m.constant_ = false;
  m.name_ = std::move(name);
  m.branch_ = branch;
  m.a_ = a;
  m.poles_ = std::move(poles);
  m.d_ = d;
  m.min_wavelength_ = min_wavelength;
  m.max_wavelength_ = max_wavelength;
  return m;
}

DispersionModel DispersionModel::named(const std::string& name) {
  if (name == "vacuum") return constant(1.0);
  // Handbook of Nonlinear Optical Crystals (Dmitriev, Gurzadyan, Nikogosyan), LiIO3.
  if (name == "liio3-ordinary") {
    return sellmeier(name, Polarization::ordinary, 3.415716, {{0.047031, 0.035306}}, 0.008801, 0.3e-6, 5.0e-6);
  }
  if (name == "liio3-extraordinary") {
    return sellmeier(name, Polarization::extraordinary, 2.918692, {{0.035145, 0.028224}}, 0.003641, 0.3e-6,
                     5.0e-6);
  }
  throw Error(ErrorKind::config, "unknown dispersion model '" + name + "'");
}

double DispersionModel::index(double wavelength) const {
  if (constant_) return a_;
  if (!(wavelength >= min_wavelength_ && wavelength <= max_wavelength_)) {
    std::ostringstream msg;
    msg << name_ << ": wavelength " << wavelength * 1e9 << " nm outside validity window [" << min_wavelength_ * 1e9
        << ", " << max_wavelength_ * 1e9 << "] nm";
    throw Error(ErrorKind::domain, msg.str());
  }
  const double l2 = (wavelength * 1e6) * (wavelength * 1e6);
  double n2 = a_ - d_ * l2;
  for (const auto& pole : poles_) n2 += pole.strength / (l2 - pole.resonance);
  return std::sqrt(n2);
}

void CrystalConfig::validate() const {
  if (!(length > 0.0)) throw Error(ErrorKind::config, "crystal length must be positive");
  if (!(std::abs(phi1) < kPi / 2) || !(std::abs(phi2) < kPi / 2)) {
    throw Error(ErrorKind::config, "emission angles must satisfy |phi| < 90 deg");
  }
}

double refractive_index(const DispersionModel& model, double wavelength) { return model.index(wavelength); }

double longitudinal_wavenumber(double omega, double n, Wavevector transverse) {
  const double k = omega * n / kSpeedOfLight;
  const double arg = k * k - (transverse.x * transverse.x + transverse.y * transverse.y);
  if (arg < 0.0) {
    throw Error(ErrorKind::evanescent, "transverse wavevector outside the propagation cone");
  }
  return std::sqrt(arg);
}

double degenerate_emission_angle(const CrystalConfig& crystal, double pump_wavelength) {
  const double omega_p = angular_frequency(pump_wavelength);
  const double omega_s = omega_p / 2.0;
  const double k_p = omega_p * crystal.pump_dispersion.index(pump_wavelength) / kSpeedOfLight;
  const double k_s = omega_s * crystal.signal_dispersion.index(2.0 * pump_wavelength) / kSpeedOfLight;
  const double ratio = k_p / (2.0 * k_s);
  if (ratio > 1.0) {
    std::ostringstream msg;
    msg << "no degenerate phase matching: k_p / (2 k_s) = " << ratio << " > 1";
    throw Error(ErrorKind::no_phase_matching, msg.str());
  }
  return std::acos(ratio);
}

double internal_to_external_angle(double theta_internal, double n) {
  const double s = n * std::sin(theta_internal);
  if (std::abs(s) > 1.0) {
    throw Error(ErrorKind::total_internal_reflection, "total internal reflection at the exit face");
  }
  return std::asin(s);
}

}  // namespace spdcshape
