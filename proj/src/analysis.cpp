#include "spdcshape/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <sstream>

#include "parallel.hpp"
#include "spdcshape/error.hpp"

namespace spdcshape {

namespace {

constexpr double kInvE2 = 0.1353352832366127;  // e^-2
constexpr int kMinSamples = 16;
constexpr int kRangeRetries = 3;

// Scenario with everything the point model ignores switched off, so that the
// integrated machinery reduces to point detection.
Scenario point_reduced(const Scenario& sc) {
  Scenario r = sc;
  r.pump.bandwidth_fwhm = 0.0;
  r.detection.filter_fwhm.reset();
  r.detection.pinhole_diameter_s = 0.0;
  r.detection.pinhole_diameter_i = 0.0;
  return r;
}

enum class Target { coincidence, singles };

// Rate as a function of the signal position.
class RateEvaluator {
 public:
  enum class Precision { full, search };

  RateEvaluator(const Scenario& sc, RateMode mode, Target target, Precision precision)
      : scenario_(mode == RateMode::point ? point_reduced(sc) : sc), mode_(mode), target_(target) {
    if (mode_ == RateMode::point && target_ == Target::coincidence) return;
    const auto kind =
        target_ == Target::coincidence ? RateIntegrator::Kind::coincidence : RateIntegrator::Kind::singles;
    const auto& s = scenario_;
    const auto coarse_quad = s.quadrature.halved();
    if (precision == Precision::full) {
      fine_ = std::make_unique<RateIntegrator>(s.geometry, s.pump, s.detection, s.quadrature, kind);
    }
    coarse_ = std::make_unique<RateIntegrator>(s.geometry, s.pump, s.detection, coarse_quad, kind);
  }

  RatePoint operator()(Position x1) const {
    const auto& s = scenario_;
    const Position x2 = s.detection.idler_position;
    RatePoint r;
    r.x1 = x1;
    r.x2 = x2;
    if (!fine_ && !coarse_) {
      r.rate = coincidence_point(s.geometry, s.pump, s.detection, x1, x2);
    } else if (!fine_) {
      r.rate = coarse_->evaluate(x1, x2);
    } else {
      r.rate = fine_->evaluate(x1, x2);
      const double rough = coarse_->evaluate(x1, x2);
      if (r.rate != 0.0 || rough != 0.0) {
        r.quadrature_estimate =
            std::abs(r.rate - rough) / std::max(std::abs(r.rate), std::numeric_limits<double>::min());
      }
      r.converged = r.quadrature_estimate <= s.quadrature.threshold;
    }
    if (!std::isfinite(r.rate)) throw Error(ErrorKind::non_finite, "rate is not finite");
    return r;
  }

 private:
  Scenario scenario_;
  RateMode mode_;
  Target target_;
  std::unique_ptr<RateIntegrator> fine_;
  std::unique_ptr<RateIntegrator> coarse_;
};

template <class F>
double golden_maximum(F&& f, double lo, double hi, double tol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Fractions in [-1, 1]; entry k and n-1-k are exact negatives.
std::vector<double> symmetric_fractions(int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) t[k] = static_cast<double>(2 * k - (n - 1)) / static_cast<double>(n - 1);
  return t;
}

std::vector<double> evaluate_all(const RateEvaluator& eval, const std::vector<Position>& points, int threads) {
  std::vector<double> rates(points.size());
  detail::parallel_for(points.size(), threads, [&](std::size_t i) { rates[i] = eval(points[i]).rate; });
  return rates;
}

// Where the signal should sit for the given idler position (linearised phase matching).
Position nominal_signal_position(const Scenario& sc) {
  const auto& c = sc.geometry.crystal;
  const Position x2 = sc.detection.idler_position;
  const double ratio = sc.geometry.signal_wavelength / sc.geometry.idler_wavelength;
  double y = -x2.y * ratio;
  if (std::sin(c.phi1) != 0.0) y = -x2.y * ratio * std::sin(c.phi2) / std::sin(c.phi1);
  return {-x2.x * ratio, y};
}

ScanResult run_scan(const RateEvaluator& eval, const Scenario& sc, Axis axis, double half_range, int n_samples,
                    RateMode mode, Position center, int threads) {
  if (n_samples < kMinSamples) {
    throw Error(ErrorKind::invalid_argument, "a scan needs at least 16 samples");
  }
  if (!(half_range > 0.0)) throw Error(ErrorKind::invalid_argument, "scan half-range must be positive");
  const auto t = symmetric_fractions(n_samples);
  std::vector<Position> points;
  points.reserve(t.size());
  for (double f : t) {
    points.push_back(axis == Axis::x ? Position{center.x + half_range * f, center.y}
                                     : Position{center.x, center.y + half_range * f});
  }
  std::vector<RatePoint> rates(points.size());
  detail::parallel_for(points.size(), threads, [&](std::size_t i) { rates[i] = eval(points[i]); });

  ScanResult scan;
  scan.label = sc.label;
  scan.axis = axis;
  scan.mode = mode;
  scan.center = center;
  double peak = 0.0;
  for (const auto& r : rates) peak = std::max(peak, r.rate);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double pos = axis == Axis::x ? points[i].x : points[i].y;
    scan.samples.push_back({pos, rates[i].rate, rates[i].quadrature_estimate});
    if (rates[i].rate >= kInvE2 * peak) {
      scan.max_convergence = std::max(scan.max_convergence, rates[i].quadrature_estimate);
      scan.converged = scan.converged && rates[i].converged;
    }
  }
  if (!(peak > 0.0)) throw Error(ErrorKind::scan, "all-zero profile: the scan range does not cover the coincidence peak");
  return scan;
}

bool unimodal(const std::vector<ScanSample>& s, std::size_t peak_index) {
  const double peak = s[peak_index].rate;
  const double floor = 1e-3 * peak;
  auto rises = [&](std::size_t from, std::size_t to) {
    return s[to].rate > s[from].rate * (1.0 + 1e-9) + 1e-12 * peak && s[to].rate > floor;
  };
  for (std::size_t i = peak_index; i + 1 < s.size(); ++i) {
    if (rises(i, i + 1)) return false;
  }
  for (std::size_t i = peak_index; i > 0; --i) {
    if (rises(i, i - 1)) return false;
  }
  return true;
}

WidthResult threshold_width(const ScanResult& scan) {
  const auto& s = scan.samples;
  const auto it = std::max_element(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.rate < b.rate; });
  const auto peak_index = static_cast<std::size_t>(it - s.begin());
  const double level = it->rate * kInvE2;
  std::size_t right = peak_index;
  while (right < s.size() && s[right].rate >= level) ++right;
  std::size_t left = peak_index;
  bool left_found = false;
  while (true) {
    if (s[left].rate < level) {
      left_found = true;
      break;
    }
    if (left == 0) break;
    --left;
  }
  if (right == s.size() || !left_found) {
    throw Error(ErrorKind::scan, "profile does not fall to 1/e^2 of its peak inside the scan range");
  }
  auto cross = [&](std::size_t below, std::size_t above) {
    const auto& a = s[above];
    const auto& b = s[below];
    return a.position + (level - a.rate) * (b.position - a.position) / (b.rate - a.rate);
  };
  const double x_right = cross(right, right - 1);
  const double x_left = cross(left, left + 1);
  return {(x_right - x_left) / 2.0, WidthMethod::threshold_crossing, false, 0.0};
}

// Levenberg-Marquardt fit of A exp(-2 (x - x0)^2 / w^2).
WidthResult gaussian_fit(const ScanResult& scan, const WidthResult& seed) {
  const auto& s = scan.samples;
  const auto it = std::max_element(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.rate < b.rate; });
  const double peak = it->rate;
  const double scale = seed.width;
  const auto n = static_cast<Eigen::Index>(s.size());
  Eigen::VectorXd x(n);
  Eigen::VectorXd y(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    x(k) = (s[k].position - it->position) / scale;
    y(k) = s[k].rate / peak;
  }
  Eigen::Vector3d p(1.0, 0.0, 1.0);  // amplitude, centre, width (scaled units)
  auto residuals = [&](const Eigen::Vector3d& q) {
    Eigen::VectorXd r(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double u = (x(k) - q(1)) / q(2);
      r(k) = q(0) * std::exp(-2.0 * u * u) - y(k);
    }
    return r;
  };
  double lambda = 1e-3;
  Eigen::VectorXd r = residuals(p);
  double cost = r.squaredNorm();
  for (int iter = 0; iter < 200; ++iter) {
    Eigen::MatrixXd jac(n, 3);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double u = (x(k) - p(1)) / p(2);
      const double g = std::exp(-2.0 * u * u);
      jac(k, 0) = g;
      jac(k, 1) = p(0) * g * 4.0 * u / p(2);
      jac(k, 2) = p(0) * g * 4.0 * u * u / p(2);
    }
    const Eigen::Matrix3d jtj = jac.transpose() * jac;
    const Eigen::Vector3d jtr = jac.transpose() * r;
    Eigen::Matrix3d damped = jtj;
    damped.diagonal() += lambda * jtj.diagonal();
    const Eigen::Vector3d step = damped.ldlt().solve(-jtr);
    Eigen::Vector3d trial = p + step;
    trial(2) = std::abs(trial(2));
    const Eigen::VectorXd r_trial = residuals(trial);
    const double trial_cost = r_trial.squaredNorm();
    if (trial_cost < cost) {
      const double gain = cost - trial_cost;
      p = trial;
      r = r_trial;
      cost = trial_cost;
      lambda = std::max(lambda / 3.0, 1e-12);
      if (gain < 1e-15 * std::max(cost, 1e-30) || step.norm() < 1e-12) break;
    } else {
      lambda *= 4.0;
      if (lambda > 1e12) break;
    }
  }
  WidthResult out;
  out.width = std::abs(p(2)) * scale;
  out.method = WidthMethod::gaussian_fit;
  out.fit_residual = r.cwiseAbs().maxCoeff();
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

}  // namespace

const char* to_string(Axis axis) { return axis == Axis::x ? "x" : "y"; }
const char* to_string(RateMode mode) { return mode == RateMode::point ? "point" : "integrated"; }

RatePoint signal_rate(const Scenario& scenario, RateMode mode, Position x1) {
  const RateEvaluator eval(scenario, mode, Target::coincidence, RateEvaluator::Precision::full);
  return eval(x1);
}

double auto_half_range(const Scenario& sc, Axis axis, RateMode mode) {
  const auto& g = sc.geometry;
  const auto& c = g.crystal;
  const double lf = g.signal_wavelength * sc.detection.focal_length;
  const bool integrated = mode == RateMode::integrated;
  const double pinholes =
      integrated ? 0.5 * (sc.detection.pinhole_diameter_s + sc.detection.pinhole_diameter_i) : 0.0;
  if (axis == Axis::x) return 3.0 * thin_crystal_width(g.signal_wavelength, sc.detection.focal_length, sc.pump.w0) +
                              2.0 * pinholes;

  const double envelope = lf / (kPi * sc.pump.w0 * std::cos(c.phi1));
  double width = envelope;
  const double s1 = std::abs(std::sin(c.phi1));
  if (s1 > 0.0) width = std::min(width, 2.2 * lf / (kPi * c.length * s1));
  double shift = 0.0;
  if (integrated && !sc.pump.monochromatic() && s1 > 0.0) {
    // Drift of the phase-matched direction across the pump spectrum.
    const double sigma = sc.pump.bandwidth_fwhm_omega() / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    const double h = 1e-3 * sigma;
    const double ws = g.signal_omega();
    const double wi = g.idler_omega();
    const auto dk_plus = phase_mismatch(g, ws + h / 2, wi + h / 2, {}, {});
    const auto dk_minus = phase_mismatch(g, ws - h / 2, wi - h / 2, {}, {});
    if (dk_plus && dk_minus) {
      const double slope = (dk_plus->delta_k - dk_minus->delta_k) / h;
      shift = std::abs(slope) * 2.0 * sigma / s1 * lf / (2.0 * kPi);
    }
  }
  return 3.0 * (width + shift) + 2.0 * pinholes;
}

Position locate_peak(const Scenario& sc, RateMode mode, int threads) {
  const RateEvaluator eval(sc, mode, Target::coincidence, RateEvaluator::Precision::search);
  const Position nominal = nominal_signal_position(sc);
  const double range_x = auto_half_range(sc, Axis::x, mode);
  const double range_y = auto_half_range(sc, Axis::y, mode);
  auto rate_at = [&](double x, double y) { return eval({x, y}).rate; };

  if (sc.detection.idler_position.x == 0.0) {
    constexpr int kGrid = 33;
    const auto t = symmetric_fractions(kGrid);
    std::vector<Position> pts;
    for (double f : t) pts.push_back({0.0, nominal.y + range_y * f});
    const auto rates = evaluate_all(eval, pts, threads);
    const auto best = static_cast<std::size_t>(std::max_element(rates.begin(), rates.end()) - rates.begin());
    if (!(rates[best] > 0.0)) throw Error(ErrorKind::scan, "all-zero profile while searching for the peak");
    const double lo = pts[best == 0 ? 0 : best - 1].y;
    const double hi = pts[std::min(best + 1, pts.size() - 1)].y;
    const double y = golden_maximum([&](double v) { return rate_at(0.0, v); }, lo, hi, 1e-6 * (hi - lo));
    return {0.0, y};
  }

  constexpr int kGrid = 17;
  const auto t = symmetric_fractions(kGrid);
  std::vector<Position> pts;
  for (double fx : t) {
    for (double fy : t) pts.push_back({nominal.x + range_x * fx, nominal.y + range_y * fy});
  }
  const auto rates = evaluate_all(eval, pts, threads);
  const auto best = static_cast<std::size_t>(std::max_element(rates.begin(), rates.end()) - rates.begin());
  if (!(rates[best] > 0.0)) throw Error(ErrorKind::scan, "all-zero profile while searching for the peak");
  const double step_x = 2.0 * range_x / (kGrid - 1);
  const double step_y = 2.0 * range_y / (kGrid - 1);
  Position p = pts[best];
  for (int round = 0; round < 2; ++round) {
    p.x = golden_maximum([&](double v) { return rate_at(v, p.y); }, p.x - step_x, p.x + step_x, 1e-6 * step_x);
    p.y = golden_maximum([&](double v) { return rate_at(p.x, v); }, p.y - step_y, p.y + step_y, 1e-6 * step_y);
  }
  return p;
}

ScanResult scan_cut(const Scenario& sc, Axis axis, double half_range, int n_samples, RateMode mode,
                    const ScanOptions& options) {
  if (n_samples < kMinSamples) {
    throw Error(ErrorKind::invalid_argument, "a scan needs at least 16 samples");
  }
  const Position center = options.center ? *options.center : locate_peak(sc, mode, options.threads);
  const RateEvaluator eval(sc, mode, Target::coincidence, RateEvaluator::Precision::full);
  return run_scan(eval, sc, axis, half_range, n_samples, mode, center, options.threads);
}

ScanResult scan_singles(const Scenario& sc, Axis axis, double half_range, int n_samples, RateMode mode,
                        Position center, int threads) {
  const RateEvaluator eval(sc, mode, Target::singles, RateEvaluator::Precision::full);
  return run_scan(eval, sc, axis, half_range, n_samples, mode, center, threads);
}

WidthResult half_width_e2(const ScanResult& scan, WidthMethod method) {
  const auto& s = scan.samples;
  if (s.size() < static_cast<std::size_t>(kMinSamples)) {
    throw Error(ErrorKind::scan, "width extraction needs at least 16 samples");
  }
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (!(s[i].position > s[i - 1].position)) throw Error(ErrorKind::scan, "scan positions must increase");
  }
  const auto it = std::max_element(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.rate < b.rate; });
  const auto peak_index = static_cast<std::size_t>(it - s.begin());
  if (!(it->rate > 0.0)) throw Error(ErrorKind::scan, "all-zero profile");
  if (peak_index == 0 || peak_index + 1 == s.size()) {
    throw Error(ErrorKind::scan, "profile peak lies at the edge of the scan range");
  }
  const WidthResult threshold = threshold_width(scan);
  if (method == WidthMethod::threshold_crossing) return threshold;
  if (!unimodal(s, peak_index)) {
    WidthResult r = threshold;
    r.fell_back = true;
    return r;
  }
  return gaussian_fit(scan, threshold);
}

double noncollinear_length(double w0, double phi1) {
  if (!(std::abs(phi1) > 0.0) || !(std::abs(phi1) <= kPi / 2)) {
    throw Error(ErrorKind::invalid_argument, "noncollinear length needs 0 < |phi1| <= pi/2");
  }
  return w0 / std::abs(std::sin(phi1));
}

double thin_crystal_width(double lambda_s, double focal_length, double w0) {
  return lambda_s * focal_length / (kPi * w0);
}

WidthReport measure_widths(const Scenario& sc, RateMode mode, const MeasureOptions& options) {
  WidthReport report;
  report.peak = locate_peak(sc, mode, options.threads);
  ScanOptions scan_options{options.threads, report.peak};

  auto width_along = [&](Axis axis, std::optional<double> fixed, WidthMethod method, WidthMethod& used) {
    double range = fixed ? *fixed : auto_half_range(sc, axis, mode);
    for (int attempt = 0;; ++attempt) {
      const auto scan = scan_cut(sc, axis, range, options.samples, mode, scan_options);
      try {
        const auto w = half_width_e2(scan, method);
        used = w.method;
        report.max_convergence = std::max(report.max_convergence, scan.max_convergence);
        return w.width;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::scan || fixed || attempt + 1 >= kRangeRetries) throw;
        range *= 2.0;
      }
    }
  };
  report.w_x = width_along(Axis::x, options.half_range_x, WidthMethod::gaussian_fit, report.method_x);
  report.w_y = width_along(Axis::y, options.half_range_y, WidthMethod::threshold_crossing, report.method_y);
  report.ellipticity = report.w_x / report.w_y;
  return report;
}

std::vector<PumpWidthRow> sweep_pump_width(const Scenario& sc, std::span<const double> w0_values, RateMode mode,
                                           const SweepOptions& options) {
  std::vector<PumpWidthRow> rows;
  for (double w0 : w0_values) {
    if (!(w0 > 0.0)) throw Error(ErrorKind::invalid_argument, "pump widths must be positive");
    Scenario cell = sc;
    cell.pump.w0 = w0;
    const auto widths = measure_widths(cell, mode, {options.threads, options.samples, {}, {}});
    PumpWidthRow row;
    row.w0 = w0;
    row.w_x = widths.w_x;
    row.w_y = widths.w_y;
    row.ellipticity = widths.ellipticity;
    row.max_convergence = widths.max_convergence;
    row.noncollinear_length = cell.geometry.crystal.phi1 != 0.0 ? noncollinear_length(w0, cell.geometry.crystal.phi1)
                                                                : std::numeric_limits<double>::infinity();
    row.singles_x_width = std::nan("");
    if (options.include_singles) {
      double range = 1.5 * cell.detection.singles_half_window + 3.0 * widths.w_x;
      for (int attempt = 0;; ++attempt) {
        const auto scan = scan_singles(cell, Axis::x, range, options.samples, mode, widths.peak, options.threads);
        try {
          row.singles_x_width = half_width_e2(scan, WidthMethod::threshold_crossing).width;
          row.max_convergence = std::max(row.max_convergence, scan.max_convergence);
          break;
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::scan || attempt + 1 >= kRangeRetries) throw;
          range *= 2.0;
        }
      }
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<BandwidthRow> sweep_pump_bandwidth(const Scenario& sc, std::span<const double> fwhm_values,
                                               const SweepOptions& options) {
  std::vector<BandwidthRow> rows;
  for (double fwhm : fwhm_values) {
    if (!(fwhm >= 0.0)) throw Error(ErrorKind::invalid_argument, "pump bandwidths must be >= 0");
    Scenario cell = sc;
    cell.pump.bandwidth_fwhm = fwhm;
    const auto widths = measure_widths(cell, RateMode::integrated, {options.threads, options.samples, {}, {}});
    rows.push_back({fwhm, widths.w_x, widths.w_y, widths.ellipticity, widths.max_convergence});
  }
  return rows;
}

std::string scan_to_csv(const ScanResult& scan) {
  std::ostringstream out;
  out << "# scenario=" << scan.label << " axis=" << to_string(scan.axis) << " mode=" << to_string(scan.mode) << "\n";
  out << "position_m,rate,convergence\n";
  for (const auto& s : scan.samples) {
    out << format_number(s.position) << "," << format_number(s.rate) << "," << format_number(s.convergence) << "\n";
  }
  return out.str();
}

std::string pump_width_csv(const std::string& label, RateMode mode, std::span<const PumpWidthRow> rows) {
  std::ostringstream out;
  out << "# scenario=" << label << " sweep=pump_width mode=" << to_string(mode) << "\n";
  out << "w0_m,w_x_m,w_y_m,ellipticity,singles_x_width_m,L_nc_m,convergence\n";
  for (const auto& r : rows) {
    out << format_number(r.w0) << "," << format_number(r.w_x) << "," << format_number(r.w_y) << ","
        << format_number(r.ellipticity) << "," << format_number(r.singles_x_width) << ","
        << format_number(r.noncollinear_length) << "," << format_number(r.max_convergence) << "\n";
  }
  return out.str();
}

std::string pump_bandwidth_csv(const std::string& label, std::span<const BandwidthRow> rows) {
  std::ostringstream out;
  out << "# scenario=" << label << " sweep=pump_bandwidth mode=integrated\n";
  out << "fwhm_m,w_x_m,w_y_m,ellipticity,convergence\n";
  for (const auto& r : rows) {
    out << format_number(r.fwhm) << "," << format_number(r.w_x) << "," << format_number(r.w_y) << ","
        << format_number(r.ellipticity) << "," << format_number(r.max_convergence) << "\n";
  }
  return out.str();
}

}  // namespace spdcshape
