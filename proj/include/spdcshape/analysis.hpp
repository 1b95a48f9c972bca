#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spdcshape/scenario.hpp"

namespace spdcshape {

enum class Axis { x, y };  // x: vertical cut, y: horizontal cut (the emission plane)
enum class RateMode { point, integrated };
enum class WidthMethod { gaussian_fit, threshold_crossing };

const char* to_string(Axis axis);
const char* to_string(RateMode mode);

struct ScanSample {
  double position = 0.0;  // coordinate along the cut axis [m]
  double rate = 0.0;
  double convergence = 0.0;
};

struct ScanResult {
  std::string label;
  Axis axis = Axis::x;
  RateMode mode = RateMode::point;
  Position center;  // point the cut passes through
  std::vector<ScanSample> samples;
  // Summary over the samples at or above 1/e^2 of the peak, the part that sets
  // the width. Tail samples keep their own estimates.
  double max_convergence = 0.0;
  bool converged = true;
};

struct WidthResult {
  double width = 0.0;
  WidthMethod method = WidthMethod::threshold_crossing;  // method actually used
  bool fell_back = false;                                // gaussian_fit rejected a non-unimodal profile
  double fit_residual = 0.0;  // max |fit - data| / peak (gaussian_fit only)
};

struct WidthReport {
  double w_x = 0.0;
  double w_y = 0.0;
  double ellipticity = 0.0;
  WidthMethod method_x = WidthMethod::gaussian_fit;
  WidthMethod method_y = WidthMethod::threshold_crossing;
  Position peak;
  double max_convergence = 0.0;
};

struct ScanOptions {
  int threads = 1;
  std::optional<Position> center;  // skip the peak search
};

// Rate at a signal position with the idler at its configured position.
RatePoint signal_rate(const Scenario& scenario, RateMode mode, Position x1);

/*!
 * Coincidence peak in the signal detector plane.
 *
 * Coarse grid search followed by golden-section refinement per axis. When
 * the idler sits on x2_x = 0 the map is exactly even in x1_x and the search
 * is one-dimensional along y at x1_x = 0. Integrated mode searches with the
 * half-node quadrature.
 */
Position locate_peak(const Scenario& scenario, RateMode mode, int threads = 1);

// Half-range that covers a cut out to well beyond its 1/e^2 points.
double auto_half_range(const Scenario& scenario, Axis axis, RateMode mode);

ScanResult scan_cut(const Scenario& scenario, Axis axis, double half_range, int n_samples, RateMode mode,
                    const ScanOptions& options = {});

// Singles rate cut along `axis` through `center`.
ScanResult scan_singles(const Scenario& scenario, Axis axis, double half_range, int n_samples, RateMode mode,
                        Position center, int threads = 1);

WidthResult half_width_e2(const ScanResult& scan, WidthMethod method);

double noncollinear_length(double w0, double phi1);
double thin_crystal_width(double lambda_s, double focal_length, double w0);

struct MeasureOptions {
  int threads = 1;
  int samples = 41;
  std::optional<double> half_range_x;  // auto when empty
  std::optional<double> half_range_y;
};

// Peak search, both cuts, and the default width methods (fit for x, threshold for y).
WidthReport measure_widths(const Scenario& scenario, RateMode mode, const MeasureOptions& options = {});

struct PumpWidthRow {
  double w0 = 0.0;
  double w_x = 0.0;
  double w_y = 0.0;
  double ellipticity = 0.0;
  double singles_x_width = 0.0;  // NaN when not requested
  double noncollinear_length = 0.0;
  double max_convergence = 0.0;
};

struct BandwidthRow {
  double fwhm = 0.0;
  double w_x = 0.0;
  double w_y = 0.0;
  double ellipticity = 0.0;
  double max_convergence = 0.0;
};

struct SweepOptions {
  int threads = 1;
  int samples = 41;
  bool include_singles = true;
};

std::vector<PumpWidthRow> sweep_pump_width(const Scenario& scenario, std::span<const double> w0_values,
                                           RateMode mode, const SweepOptions& options = {});

// Integrated-mode cuts for each pump FWHM (wavelength, m).
std::vector<BandwidthRow> sweep_pump_bandwidth(const Scenario& scenario, std::span<const double> fwhm_values,
                                               const SweepOptions& options = {});

std::string scan_to_csv(const ScanResult& scan);
std::string pump_width_csv(const std::string& label, RateMode mode, std::span<const PumpWidthRow> rows);
std::string pump_bandwidth_csv(const std::string& label, std::span<const BandwidthRow> rows);

}  // namespace spdcshape
