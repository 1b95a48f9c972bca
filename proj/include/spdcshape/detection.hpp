#pragma once

#include <optional>
#include <vector>

#include "spdcshape/biphoton.hpp"
#include "spdcshape/quadrature.hpp"

namespace spdcshape {

// How detector positions map to transverse wavevectors inside the frequency
// integral: `frozen` uses the central wavelengths (the literal 2-f formula),
// `dispersed` uses the running wavelength of each sampled frequency.
enum class WavevectorMap { frozen, dispersed };

struct DetectionConfig {
  double focal_length = 0.25;                  // m
  double filter_center_s = 810e-9;             // m
  double filter_center_i = 810e-9;             // m
  std::optional<double> filter_fwhm = 10e-9;   // m; nullopt = no filter
  double pinhole_diameter_s = 100e-6;          // m; 0 = point detector
  double pinhole_diameter_i = 150e-6;          // m
  Position idler_position{};                   // fixed idler coupler position
  WavevectorMap map = WavevectorMap::frozen;
  double singles_half_window = 1e-3;           // idler aperture half-width for singles [m]

  void validate() const;
};

/*!
 * Node counts and windows for the filter/pinhole-integrated rates.
 *
 * Frequencies are parameterised as (omega_p, omega_s) with omega_i =
 * omega_p - omega_s. The pump axis spans +-sigmas spectral standard
 * deviations of the pump intensity spectrum; the signal axis spans +-sigmas
 * filter standard deviations (intersected with the idler filter mapped
 * through energy conservation), or +-unfiltered_half_window in wavelength
 * when there is no filter. For each pump node the signal window is further
 * clipped to the band where the pump transverse envelope can exceed
 * exp(-envelope_cutoff^2 / 2) anywhere on the pinholes.
 */
struct RateQuadrature {
  struct Spectral {
    int nodes = 32;
    Rule rule = Rule::gauss_legendre;
    double sigmas = 3.0;
  };

  Spectral pump_frequency;
  Spectral signal_frequency;
  double unfiltered_half_window = 40e-9;  // m
  int pinhole_radial = 8;
  int pinhole_angular = 16;
  int singles_nodes = 64;  // per side of the singles idler aperture
  double threshold = 1e-3;
  double envelope_cutoff = 7.0;

  void validate() const;
  RateQuadrature scaled(double factor) const;
  // Every node count halved; the companion rule for convergence estimates.
  RateQuadrature halved() const;
};

struct RatePoint {
  Position x1;
  Position x2;
  double rate = 0.0;
  double quadrature_estimate = 0.0;
  bool converged = true;
};

// 2 pi x / (lambda f), componentwise.
Wavevector position_to_wavevector(Position x, double wavelength, double focal_length);

// Gaussian intensity transmission, FWHM in wavelength; no filter -> 1.
double filter_transmission(double omega, double center_wavelength, std::optional<double> fwhm);

// |Phi|^2 at the central frequencies, point detectors, 2-f mapped positions.
double coincidence_point(const Geometry& geom, const PumpConfig& pump, const DetectionConfig& det, Position x1,
                         Position x2);

// Rate integrated over filters, pump spectrum and both pinhole discs.
RatePoint coincidence_integrated(const Geometry& geom, const PumpConfig& pump, const DetectionConfig& det,
                                 Position x1, Position x2, const RateQuadrature& quad);

// Signal singles: the integrand above summed over the idler aperture, with
// the idler pinhole and filter removed.
RatePoint singles_rate(const Geometry& geom, const PumpConfig& pump, const DetectionConfig& det, Position x1,
                       const RateQuadrature& quad);

/*!
 * Reusable evaluator for the integrated rates.
 *
 * Construction builds every node set that does not depend on detector
 * position; evaluate() is const and reentrant.
 */
class RateIntegrator {
 public:
  enum class Kind { coincidence, singles };

  RateIntegrator(const Geometry& geom, const PumpConfig& pump, const DetectionConfig& det,
                 const RateQuadrature& quad, Kind kind);

  // Raw quadrature sum at one node resolution.
  double evaluate(Position x1, Position x2) const;

 private:
  struct FrequencyNode {
    double omega = 0.0;
    double weight = 0.0;  // quadrature weight times pump spectral intensity
  };

  double signal_sum(double omega_p, Position x1, Position x2) const;
  double pair_sum(double omega_s, double omega_i, Position x1, Position x2) const;
  std::optional<std::pair<double, double>> envelope_band(double omega_p, Position x1, Position x2) const;

  Geometry geom_;
  PumpConfig pump_;
  DetectionConfig det_;
  RateQuadrature quad_;
  Kind kind_;
  std::vector<FrequencyNode> pump_nodes_;
  bool signal_collapsed_ = true;
  double signal_lo_ = 0.0;  // omega_s window before idler/envelope clipping
  double signal_hi_ = 0.0;
  std::vector<QuadratureNode> signal_reference_;  // signal rule on [0, 1]
  std::vector<DiscNode> signal_points_;
  std::vector<DiscNode> idler_points_;
  double signal_reach_ = 0.0;  // max |offset| of signal nodes
  double idler_reach_ = 0.0;
  bool idler_filtered_ = true;
  double cos1_, sin1_, cos2_, sin2_;
};

}  // namespace spdcshape
