// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed lines (capped at 100).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "spdcshape/analysis.hpp"

using namespace spdcshape;

namespace {

// Tolerances and bounds.
constexpr double kAngleTargetDeg = 17.1;
constexpr double kAngleToleranceDeg = 0.5;
constexpr double kAngleMaxSeconds = 1.0;
constexpr double kFig1aMinRatio = 3.0;
constexpr double kFig1bMinRatio = 0.7;
constexpr double kFig1bMaxRatio = 1.4;
constexpr double kScanMaxSeconds = 30.0;
constexpr double kFig3aMinRatio = 4.0;
constexpr double kFig3bMinRatio = 0.45;
constexpr double kFig3bMaxRatio = 0.95;
constexpr double kFig4WxTolerance = 0.02;
constexpr double kEllipticalRatio = 2.0;
constexpr double kRoundRatio = 1.5;
constexpr double kThinWidthTolerance = 0.03;
constexpr double kThinAmplitudeTolerance = 0.01;
constexpr double kCollapseTolerance = 1e-12;
constexpr double kSymmetryFloor = 1e-12;
constexpr double kScaleTolerance = 1e-9;      // relative, widths
constexpr double kArgmaxTolerance = 1e-9;     // m
// Supplementary comparisons with measured values.
constexpr double kFig1bCliTolerance = 0.35;
constexpr double kFig3bMeasuredWy = 180e-6;
constexpr double kFig3bMeasuredTolerance = 0.30;

const int kThreads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

struct Line {
  std::string id;
  std::string name;
  bool pass = false;
  std::string detail;
};

std::vector<Line> lines;

void report(std::string id, std::string name, bool pass, std::string detail) {
  std::printf("[%s] %-4s %s: %s\n", pass ? "PASS" : "FAIL", id.c_str(), name.c_str(), detail.c_str());
  std::fflush(stdout);
  lines.push_back({std::move(id), std::move(name), pass, std::move(detail)});
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class F>
auto timed(double& seconds, F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  auto r = f();
  seconds = seconds_since(t0);
  return r;
}

// Runs a check; an exception is a failure of that line, not of the suite.
void guarded(const std::string& id, const std::string& name, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, name, false, std::string("exception: ") + e.what());
  }
}

double asymmetry(const ScanResult& scan) {
  double peak = 0.0;
  for (const auto& s : scan.samples) peak = std::max(peak, s.rate);
  double worst = 0.0;
  const auto n = scan.samples.size();
  for (std::size_t k = 0; k < n / 2; ++k) {
    worst = std::max(worst, std::abs(scan.samples[k].rate - scan.samples[n - 1 - k].rate) / peak);
  }
  return worst;
}

std::vector<ScanResult> x_cuts;  // collected for the symmetry criterion

WidthReport widths_with_cut(const Scenario& sc, RateMode mode) {
  const auto w = measure_widths(sc, mode, {kThreads, 41, {}, {}});
  x_cuts.push_back(scan_cut(sc, Axis::x, auto_half_range(sc, Axis::x, mode), 41, mode, {kThreads, w.peak}));
  return w;
}

void criterion_1() {
  const auto sc = preset("fig1b");
  double t = 0.0;
  const double angle = timed(t, [&] { return degenerate_emission_angle(sc.geometry.crystal, sc.pump.wavelength); });
  const double deg = rad_to_deg(angle);
  report("C1", "phase-matching pin", std::abs(deg - kAngleTargetDeg) <= kAngleToleranceDeg && t < kAngleMaxSeconds,
         fmt("angle = %.4f deg (target %.1f +- %.1f), runtime %.2e s (< %.0f s)", deg, kAngleTargetDeg,
             kAngleToleranceDeg, t, kAngleMaxSeconds));
}

WidthReport fig1b_point;

void criterion_2() {
  double worst_scan = 0.0;
  auto scan_time = [&](const Scenario& sc) {
    for (Axis axis : {Axis::x, Axis::y}) {
      double t = 0.0;
      timed(t, [&] { return scan_cut(sc, axis, auto_half_range(sc, axis, RateMode::point), 41, RateMode::point); });
      worst_scan = std::max(worst_scan, t);
    }
  };
  const auto a = preset("fig1a");
  const auto b = preset("fig1b");
  const auto wa = widths_with_cut(a, RateMode::point);
  fig1b_point = widths_with_cut(b, RateMode::point);
  scan_time(a);
  scan_time(b);
  const double ra = wa.ellipticity;
  const double rb = fig1b_point.ellipticity;
  const bool pass = ra >= kFig1aMinRatio && rb >= kFig1bMinRatio && rb <= kFig1bMaxRatio && worst_scan < kScanMaxSeconds;
  report("C2", "fig1a/fig1b ellipticity (point mode)", pass,
         fmt("w0=50um: w_x/w_y = %.3f (>= %.1f) [w_x=%.1f um, w_y=%.1f um]; w0=500um: w_x/w_y = %.3f "
             "(in [%.1f, %.1f]) [w_x=%.1f um, w_y=%.1f um]; slowest scan %.3f s (< %.0f s)",
             ra, kFig1aMinRatio, wa.w_x * 1e6, wa.w_y * 1e6, rb, kFig1bMinRatio, kFig1bMaxRatio,
             fig1b_point.w_x * 1e6, fig1b_point.w_y * 1e6, worst_scan, kScanMaxSeconds));
}

void criterion_3() {
  const auto w = widths_with_cut(preset("fig3a"), RateMode::integrated);
  report("C3", "fig3a ellipticity (integrated, pinholes, monochromatic)", w.ellipticity > kFig3aMinRatio,
         fmt("w_x/w_y = %.3f (> %.1f) [w_x=%.1f um, w_y=%.1f um, convergence %.1e]", w.ellipticity, kFig3aMinRatio,
             w.w_x * 1e6, w.w_y * 1e6, w.max_convergence));
}

WidthReport fig3b_integrated;

void criterion_4() {
  fig3b_integrated = widths_with_cut(preset("fig3b"), RateMode::integrated);
  const double r = fig3b_integrated.ellipticity;
  report("C4", "fig3b reversal (w0=500um, 0.6 nm pump, 10 nm filters)",
         r < 1.0 && r >= kFig3bMinRatio && r <= kFig3bMaxRatio,
         fmt("w_x/w_y = %.3f (< 1, in [%.2f, %.2f]) [w_x=%.1f um, w_y=%.1f um, convergence %.1e]", r, kFig3bMinRatio,
             kFig3bMaxRatio, fig3b_integrated.w_x * 1e6, fig3b_integrated.w_y * 1e6,
             fig3b_integrated.max_convergence));
}

void criterion_5() {
  const auto sc = preset("fig4");
  const std::vector<double> fwhm = {0.0, 0.3e-9, 0.6e-9};
  std::vector<WidthReport> w;
  for (double f : fwhm) {
    auto cell = sc;
    cell.pump.bandwidth_fwhm = f;
    w.push_back(widths_with_cut(cell, RateMode::integrated));
  }
  const bool increasing = w[1].w_y > w[0].w_y && w[2].w_y > w[1].w_y;
  double wx_lo = w[0].w_x;
  double wx_hi = w[0].w_x;
  for (const auto& r : w) {
    wx_lo = std::min(wx_lo, r.w_x);
    wx_hi = std::max(wx_hi, r.w_x);
  }
  const double spread = (wx_hi - wx_lo) / wx_lo;
  report("C5", "fig4 pump-bandwidth effect (w0=32um)", increasing && spread <= kFig4WxTolerance,
         fmt("w_y = %.1f / %.1f / %.1f um (strictly increasing); w_x = %.1f / %.1f / %.1f um (spread %.3f%% <= %.0f%%)",
             w[0].w_y * 1e6, w[1].w_y * 1e6, w[2].w_y * 1e6, w[0].w_x * 1e6, w[1].w_x * 1e6, w[2].w_x * 1e6,
             spread * 100, kFig4WxTolerance * 100));
}

void criterion_6() {
  const auto sc = preset("fig1a");
  const double length = sc.geometry.crystal.length;
  const std::vector<double> w0 = {10e-6, 32e-6, 100e-6, 500e-6, 2000e-6};
  const auto rows = sweep_pump_width(sc, w0, RateMode::point, {kThreads, 41, false});
  bool pass = true;
  int short_cases = 0;
  int long_cases = 0;
  std::string detail;
  for (const auto& r : rows) {
    const double lnc = r.noncollinear_length;
    std::string verdict = "no constraint";
    if (lnc < length / 5) {
      ++short_cases;
      const bool ok = r.ellipticity > kEllipticalRatio;
      pass = pass && ok;
      verdict = ok ? "> 2 ok" : "> 2 VIOLATED";
    } else if (lnc > 5 * length) {
      ++long_cases;
      const bool ok = r.ellipticity < kRoundRatio;
      pass = pass && ok;
      verdict = ok ? "< 1.5 ok" : "< 1.5 VIOLATED";
    }
    detail += fmt("w0=%.0fum L_nc=%.3gmm e=%.3f (%s); ", r.w0 * 1e6, lnc * 1e3, r.ellipticity, verdict.c_str());
  }
  detail += fmt("%d case(s) with L_nc < L/5, %d with L_nc > 5L", short_cases, long_cases);
  if (long_cases == 0) detail += " (the L_nc > 5L branch is vacuous for this w0 list)";
  report("C6", "noncollinear-length law", pass && short_cases > 0, detail);
}

// Normalised |Phi| against the thin-crystal amplitude on a 21 x 21 (p_y, q_y)
// grid spanning +-3/w0.
double thin_amplitude_error(const Scenario& sc) {
  const double w = sc.pump.w0;
  const double ws = sc.geometry.signal_omega();
  const double wi = sc.geometry.idler_omega();
  std::vector<double> full;
  std::vector<double> thin;
  for (int i = 0; i < 21; ++i) {
    for (int j = 0; j < 21; ++j) {
      const double py = (-3.0 + 0.3 * i) / w;
      const double qy = (-3.0 + 0.3 * j) / w;
      full.push_back(std::abs(mode_function(sc.geometry, sc.pump, ws, wi, {0, py}, {0, qy}).phi));
      thin.push_back(std::abs(mode_function_thin_crystal(sc.geometry, sc.pump, {0, py}, {0, qy})));
    }
  }
  const double full_peak = *std::max_element(full.begin(), full.end());
  const double thin_peak = *std::max_element(thin.begin(), thin.end());
  double worst = 0.0;
  for (std::size_t k = 0; k < full.size(); ++k) worst = std::max(worst, std::abs(full[k] / full_peak - thin[k] / thin_peak));
  return worst;
}

void criterion_7() {
  auto sc = preset("fig1b");
  sc.geometry.crystal.length = 10e-6;
  const std::vector<double> w0 = {32e-6, 100e-6, 500e-6};
  double worst_width = 0.0;
  std::string detail;
  for (double w : w0) {
    auto cell = sc;
    cell.pump.w0 = w;
    const auto m = measure_widths(cell, RateMode::point, {kThreads, 41, {}, {}});
    const double formula = thin_crystal_width(cell.geometry.signal_wavelength, cell.detection.focal_length, w);
    const double err = std::abs(m.w_x - formula) / formula;
    worst_width = std::max(worst_width, err);
    detail += fmt("w0=%.0fum: w_x=%.2f um vs %.2f um (%.3f%%); ", w * 1e6, m.w_x * 1e6, formula * 1e6, err * 100);
  }
  // The amplitude check is made at the preset waist. Smaller waists are shown
  // for reference: at w0 = 32 um the grid edge reaches |dk L/2| ~ 0.28, where
  // the sinc itself is 0.987.
  const double amplitude = thin_amplitude_error(sc);
  detail += fmt("preset w0=%.0fum: max||Phi|-|Phi_thin|| = %.2e", sc.pump.w0 * 1e6, amplitude);
  for (double w : {100e-6, 32e-6}) {
    auto cell = sc;
    cell.pump.w0 = w;
    detail += fmt(" (info: w0=%.0fum %.2e)", w * 1e6, thin_amplitude_error(cell));
  }
  report("C7", "thin-crystal oracle (L=10um)",
         worst_width <= kThinWidthTolerance && amplitude <= kThinAmplitudeTolerance,
         detail + fmt("; limits %.0f%% / %.0f%%", kThinWidthTolerance * 100, kThinAmplitudeTolerance * 100));
}

void criterion_8() {
  double worst = 0.0;
  int points = 0;
  for (const char* name : {"fig1a", "fig3a", "fig1b"}) {
    auto sc = preset(name);
    sc.pump.bandwidth_fwhm = 0.0;
    sc.detection.filter_fwhm.reset();
    sc.detection.pinhole_diameter_s = 0.0;
    sc.detection.pinhole_diameter_i = 0.0;
    const auto scan = scan_cut(sc, Axis::y, auto_half_range(sc, Axis::y, RateMode::point), 17, RateMode::point);
    for (int k : {1, 5, 8, 11, 15}) {
      const Position x1{scan.center.x, scan.samples[k].position};
      const double point = scan.samples[k].rate;
      const double integrated = signal_rate(sc, RateMode::integrated, x1).rate;
      worst = std::max(worst, std::abs(integrated - point) / point);
      ++points;
    }
  }
  report("C8", "integrated -> point collapse", worst <= kCollapseTolerance,
         fmt("max relative difference %.2e over %d scan points (<= %.0e)", worst, points, kCollapseTolerance));
}

void criterion_9() {
  const auto sc = preset("fig3a");
  const std::vector<double> w0 = {32e-6, 100e-6, 500e-6};
  const std::vector<double> fwhm = {0.0, 0.3e-9};
  const int many = std::max(4, kThreads);
  auto point_csv = [&](int threads) {
    return pump_width_csv(sc.label, RateMode::point, sweep_pump_width(sc, w0, RateMode::point, {threads, 41, true}));
  };
  auto integrated_csv = [&](int threads) {
    auto cell = preset("fig1a");
    return pump_bandwidth_csv(cell.label, sweep_pump_bandwidth(cell, fwhm, {threads, 21, false}));
  };
  const bool point_same = point_csv(1) == point_csv(many);
  const bool integrated_same = integrated_csv(1) == integrated_csv(many);
  report("C9", "worker-count determinism", point_same && integrated_same,
         fmt("pump-width sweep (point, with singles) 1 vs %d workers: %s; pump-bandwidth sweep (integrated) 1 vs %d "
             "workers: %s",
             many, point_same ? "byte-identical" : "DIFFERENT", many, integrated_same ? "byte-identical" : "DIFFERENT"));
}

void criterion_10() {
  bool symmetric = true;
  double worst_asym = 0.0;
  for (const auto& cut : x_cuts) {
    double conv = 0.0;
    for (const auto& s : cut.samples) conv = std::max(conv, s.convergence);
    const double asym = asymmetry(cut);
    worst_asym = std::max(worst_asym, asym);
    symmetric = symmetric && asym <= std::max(conv, kSymmetryFloor);
  }

  bool invariant = true;
  double worst_width = 0.0;
  double worst_peak = 0.0;
  const std::vector<std::pair<const char*, RateMode>> cases = {
      {"fig1a", RateMode::point}, {"fig1b", RateMode::point}, {"fig3a", RateMode::integrated}};
  for (const auto& [name, mode] : cases) {
    const auto base_sc = preset(name);
    const auto base = measure_widths(base_sc, mode, {kThreads, 41, {}, {}});
    for (double amplitude : {0.5, 3.0, 1e3}) {
      auto sc = base_sc;
      sc.pump.amplitude = amplitude;
      const auto w = measure_widths(sc, mode, {kThreads, 41, {}, {}});
      const double dw = std::max(std::abs(w.w_x - base.w_x) / base.w_x, std::abs(w.w_y - base.w_y) / base.w_y);
      const double dp = std::hypot(w.peak.x - base.peak.x, w.peak.y - base.peak.y);
      worst_width = std::max(worst_width, dw);
      worst_peak = std::max(worst_peak, dp);
      invariant = invariant && dw <= kScaleTolerance && dp <= kArgmaxTolerance;
    }
  }
  report("C10", "symmetry suite", symmetric && invariant && !x_cuts.empty(),
         fmt("%zu x-cuts, max mirror asymmetry %.2e (<= max(convergence, %.0e) per cut); pump-power scaling: max "
             "width change %.2e (<= %.0e), max argmax shift %.2e m (<= %.0e m)",
             x_cuts.size(), worst_asym, kSymmetryFloor, worst_width, kScaleTolerance, worst_peak, kArgmaxTolerance));
}

void supplementary() {
  {
    const double rel = std::abs(fig1b_point.w_x - fig1b_point.w_y) / fig1b_point.w_y;
    report("S1", "fig1b x/y point-mode widths within 35% (scan example)", rel <= kFig1bCliTolerance,
           fmt("|w_x - w_y|/w_y = %.1f%% [w_x=%.1f um, w_y=%.1f um]", rel * 100, fig1b_point.w_x * 1e6,
               fig1b_point.w_y * 1e6));
  }
  {
    const double rel = std::abs(fig3b_integrated.w_y - kFig3bMeasuredWy) / kFig3bMeasuredWy;
    report("S2", "fig3b integrated w_y vs measured 180 um (+-30%)", rel <= kFig3bMeasuredTolerance,
           fmt("w_y = %.1f um (%+.0f%%)", fig3b_integrated.w_y * 1e6,
               (fig3b_integrated.w_y / kFig3bMeasuredWy - 1.0) * 100));
  }
  {
    const auto sc = preset("fig4");
    const auto peak = locate_peak(sc, RateMode::integrated, kThreads);
    const double a = signal_rate(sc, RateMode::integrated, peak).rate;
    auto doubled = sc;
    doubled.quadrature = sc.quadrature.scaled(2.0);
    const double b = signal_rate(doubled, RateMode::integrated, peak).rate;
    const double rel = std::abs(a - b) / std::abs(b);
    report("S3", "grid doubling at the fig4 peak", rel < 1e-3, fmt("relative change %.2e (< 1e-3)", rel));
  }
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  guarded("C1", "phase-matching pin", criterion_1);
  guarded("C2", "fig1a/fig1b ellipticity (point mode)", criterion_2);
  guarded("C3", "fig3a ellipticity", criterion_3);
  guarded("C4", "fig3b reversal", criterion_4);
  guarded("C5", "fig4 pump-bandwidth effect", criterion_5);
  guarded("C6", "noncollinear-length law", criterion_6);
  guarded("C7", "thin-crystal oracle", criterion_7);
  guarded("C8", "integrated -> point collapse", criterion_8);
  guarded("C9", "worker-count determinism", criterion_9);
  guarded("C10", "symmetry suite", criterion_10);
  guarded("S", "supplementary comparisons", supplementary);

  const auto failed = std::count_if(lines.begin(), lines.end(), [](const Line& l) { return !l.pass; });
  std::printf("%zu checks, %ld failed, %.1f s\n", lines.size(), static_cast<long>(failed), seconds_since(t0));
  return static_cast<int>(std::min<long>(failed, 100));
}
