#pragma once

#include <string>
#include <vector>

#include "spdcshape/units.hpp"

namespace spdcshape {

enum class Polarization { ordinary, extraordinary };

/*!
 * Refractive index as a function of vacuum wavelength.
 *
 * Either a wavelength-independent constant or a Sellmeier sum of the form
 *
 *   n^2 = A + sum_j B_j / (l^2 - C_j) - D l^2,   l in micrometres,
 *
 * which is the form the usual handbook tables for LiIO3 are quoted in.
 * Sellmeier models carry a validity window; evaluating outside it throws.
 */
class DispersionModel {
 public:
  struct Pole {
    double strength;    // B_j [um^2]
    double resonance;   // C_j [um^2]
  };

  static DispersionModel constant(double n);
  static DispersionModel sellmeier(std::string name, Polarization branch, double a, std::vector<Pole> poles,
                                   double d, double min_wavelength, double max_wavelength);

  // Named models: "vacuum", "liio3-ordinary", "liio3-extraordinary".
  static DispersionModel named(const std::string& name);

  bool is_constant() const { return constant_; }
  double constant_index() const { return a_; }
  const std::string& name() const { return name_; }
  Polarization branch() const { return branch_; }
  double min_wavelength() const { return min_wavelength_; }
  double max_wavelength() const { return max_wavelength_; }

  double index(double wavelength) const;

 private:
  DispersionModel() = default;

  bool constant_ = true;
  std::string name_;
  Polarization branch_ = Polarization::ordinary;
  double a_ = 1.0;
  std::vector<Pole> poles_;
  double d_ = 0.0;
  double min_wavelength_ = 0.0;
  double max_wavelength_ = 0.0;
};

struct CrystalConfig {
  double length = 5e-3;  // m
  DispersionModel pump_dispersion = DispersionModel::constant(1.0);
  DispersionModel signal_dispersion = DispersionModel::constant(1.0);
  DispersionModel idler_dispersion = DispersionModel::constant(1.0);
  double phi1 = 0.0;  // internal signal emission angle [rad], signed
  double phi2 = 0.0;  // internal idler emission angle [rad], signed

  void validate() const;
};

double refractive_index(const DispersionModel& model, double wavelength);

// sqrt((omega n / c)^2 - |transverse|^2); throws ErrorKind::evanescent outside the cone.
double longitudinal_wavenumber(double omega, double n, Wavevector transverse);

// Internal angle at which degenerate signal/idler are phase matched on axis:
// arccos(k_p / (2 k_s)) with k_p at the pump wavelength and k_s at twice it.
double degenerate_emission_angle(const CrystalConfig& crystal, double pump_wavelength);

// Snell refraction through an exit face normal to z.
double internal_to_external_angle(double theta_internal, double n);

}  // namespace spdcshape
