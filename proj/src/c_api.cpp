#include "spdcshape/spdcshape.h"

#include <cstring>
#include <new>
#include <string>
#include <variant>
#include <vector>

#include "spdcshape/analysis.hpp"
#include "spdcshape/error.hpp"

struct spdc_scenario {
  spdcshape::Scenario value;
};

struct spdc_scan {
  spdcshape::ScanResult value;
  double threshold = 0.0;
};

struct spdc_table {
  std::string label;
  spdcshape::RateMode mode = spdcshape::RateMode::point;
  std::variant<std::vector<spdcshape::PumpWidthRow>, std::vector<spdcshape::BandwidthRow>> rows;
};

namespace {

using namespace spdcshape;

thread_local std::string last_error;

spdc_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return SPDC_ERR_DOMAIN;
    case ErrorKind::evanescent: return SPDC_ERR_EVANESCENT;
    case ErrorKind::no_phase_matching: return SPDC_ERR_NO_PHASE_MATCHING;
    case ErrorKind::total_internal_reflection: return SPDC_ERR_TOTAL_INTERNAL_REFLECTION;
    case ErrorKind::non_finite: return SPDC_ERR_NON_FINITE;
    case ErrorKind::config: return SPDC_ERR_CONFIG;
    case ErrorKind::scan: return SPDC_ERR_SCAN;
    case ErrorKind::invalid_argument: return SPDC_ERR_INVALID_ARGUMENT;
  }
  return SPDC_ERR_INTERNAL;
}

spdc_status fail(spdc_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <class F>
spdc_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return SPDC_OK;
  } catch (const Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SPDC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SPDC_ERR_INTERNAL, e.what());
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::invalid_argument, what);
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

RateMode to_mode(spdc_mode mode) {
  require(mode == SPDC_MODE_POINT || mode == SPDC_MODE_INTEGRATED, "unknown rate mode");
  return mode == SPDC_MODE_POINT ? RateMode::point : RateMode::integrated;
}

Axis to_axis(spdc_axis axis) {
  require(axis == SPDC_AXIS_X || axis == SPDC_AXIS_Y, "unknown axis");
  return axis == SPDC_AXIS_X ? Axis::x : Axis::y;
}

}  // namespace

extern "C" {

const char* spdc_version(void) { return "0.1.0"; }

const char* spdc_last_error(void) { return last_error.c_str(); }

const char* spdc_status_name(spdc_status status) {
  switch (status) {
    case SPDC_OK: return "ok";
    case SPDC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SPDC_ERR_CONFIG: return "config error";
    case SPDC_ERR_DOMAIN: return "outside dispersion model";
    case SPDC_ERR_EVANESCENT: return "evanescent wave";
    case SPDC_ERR_NO_PHASE_MATCHING: return "no phase matching";
    case SPDC_ERR_TOTAL_INTERNAL_REFLECTION: return "total internal reflection";
    case SPDC_ERR_NON_FINITE: return "non-finite result";
    case SPDC_ERR_SCAN: return "scan failure";
    case SPDC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void spdc_string_free(char* text) { delete[] text; }

spdc_status spdc_preset_names(char** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    std::string joined;
    for (const auto& name : preset_names()) joined += (joined.empty() ? "" : ",") + name;
    *out = copy_string(joined);
  });
}

spdc_status spdc_scenario_resolve(const char* ref, spdc_scenario** out) {
  return guarded([&] {
    require(ref != nullptr && out != nullptr, "null argument");
    *out = new spdc_scenario{resolve_scenario(ref)};
  });
}

spdc_status spdc_scenario_from_json(const char* text, spdc_scenario** out) {
  return guarded([&] {
    require(text != nullptr && out != nullptr, "null argument");
    *out = new spdc_scenario{scenario_from_json(text)};
  });
}

spdc_status spdc_scenario_clone(const spdc_scenario* scenario, spdc_scenario** out) {
  return guarded([&] {
    require(scenario != nullptr && out != nullptr, "null argument");
    *out = new spdc_scenario{scenario->value};
  });
}

void spdc_scenario_free(spdc_scenario* scenario) { delete scenario; }

spdc_status spdc_scenario_set_pump_waist(spdc_scenario* scenario, double w0) {
  return guarded([&] {
    require(scenario != nullptr, "null scenario");
    auto pump = scenario->value.pump;
    pump.w0 = w0;
    pump.validate();
    scenario->value.pump = pump;
  });
}

spdc_status spdc_scenario_set_pump_bandwidth(spdc_scenario* scenario, double fwhm) {
  return guarded([&] {
    require(scenario != nullptr, "null scenario");
    auto pump = scenario->value.pump;
    pump.bandwidth_fwhm = fwhm;
    pump.validate();
    scenario->value.pump = pump;
  });
}

spdc_status spdc_scenario_scale_quadrature(spdc_scenario* scenario, double factor) {
  return guarded([&] {
    require(scenario != nullptr, "null scenario");
    scenario->value.quadrature = scenario->value.quadrature.scaled(factor);
  });
}

spdc_status spdc_scenario_label(const spdc_scenario* scenario, char** out) {
  return guarded([&] {
    require(scenario != nullptr && out != nullptr, "null argument");
    *out = copy_string(scenario->value.label);
  });
}

spdc_status spdc_scenario_to_json(const spdc_scenario* scenario, char** out) {
  return guarded([&] {
    require(scenario != nullptr && out != nullptr, "null argument");
    *out = copy_string(scenario_to_json(scenario->value));
  });
}

spdc_status spdc_scenario_report(const spdc_scenario* scenario, char** out) {
  return guarded([&] {
    require(scenario != nullptr && out != nullptr, "null argument");
    *out = copy_string(report_json(scenario->value));
  });
}

spdc_status spdc_degenerate_emission_angle(const spdc_scenario* scenario, double* angle) {
  return guarded([&] {
    require(scenario != nullptr && angle != nullptr, "null argument");
    *angle = degenerate_emission_angle(scenario->value.geometry.crystal, scenario->value.pump.wavelength);
  });
}

spdc_status spdc_noncollinear_length(double w0, double phi1, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = noncollinear_length(w0, phi1);
  });
}

spdc_status spdc_thin_crystal_width(double signal_wavelength, double focal_length, double w0, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    require(signal_wavelength > 0.0 && focal_length > 0.0 && w0 > 0.0, "arguments must be positive");
    *out = thin_crystal_width(signal_wavelength, focal_length, w0);
  });
}

spdc_status spdc_coincidence_point(const spdc_scenario* scenario, double x, double y, double* rate) {
  return guarded([&] {
    require(scenario != nullptr && rate != nullptr, "null argument");
    *rate = signal_rate(scenario->value, RateMode::point, {x, y}).rate;
  });
}

spdc_status spdc_coincidence_integrated(const spdc_scenario* scenario, double x, double y, double* rate,
                                        double* convergence) {
  return guarded([&] {
    require(scenario != nullptr && rate != nullptr, "null argument");
    const auto r = signal_rate(scenario->value, RateMode::integrated, {x, y});
    *rate = r.rate;
    if (convergence != nullptr) *convergence = r.quadrature_estimate;
  });
}

spdc_status spdc_scan_cut(const spdc_scenario* scenario, spdc_axis axis, spdc_mode mode, double half_range,
                          int samples, int threads, spdc_scan** out) {
  return guarded([&] {
    require(scenario != nullptr && out != nullptr, "null argument");
    const auto& sc = scenario->value;
    const Axis a = to_axis(axis);
    const RateMode m = to_mode(mode);
    const double range = half_range > 0.0 ? half_range : auto_half_range(sc, a, m);
    auto scan = scan_cut(sc, a, range, samples, m, {threads, {}});
    *out = new spdc_scan{std::move(scan), sc.quadrature.threshold};
  });
}

void spdc_scan_free(spdc_scan* scan) { delete scan; }

size_t spdc_scan_size(const spdc_scan* scan) { return scan == nullptr ? 0 : scan->value.samples.size(); }

spdc_status spdc_scan_sample(const spdc_scan* scan, size_t index, double* position, double* rate,
                             double* convergence) {
  return guarded([&] {
    require(scan != nullptr, "null scan");
    require(index < scan->value.samples.size(), "sample index out of range");
    const auto& s = scan->value.samples[index];
    if (position != nullptr) *position = s.position;
    if (rate != nullptr) *rate = s.rate;
    if (convergence != nullptr) *convergence = s.convergence;
  });
}

size_t spdc_scan_unconverged(const spdc_scan* scan) {
  if (scan == nullptr) return 0;
  size_t count = 0;
  for (const auto& s : scan->value.samples) count += s.convergence > scan->threshold ? 1 : 0;
  return count;
}

spdc_status spdc_scan_csv(const spdc_scan* scan, char** out) {
  return guarded([&] {
    require(scan != nullptr && out != nullptr, "null argument");
    *out = copy_string(scan_to_csv(scan->value));
  });
}

spdc_status spdc_scan_half_width(const spdc_scan* scan, spdc_width_method method, double* width) {
  return guarded([&] {
    require(scan != nullptr && width != nullptr, "null argument");
    require(method == SPDC_WIDTH_GAUSSIAN_FIT || method == SPDC_WIDTH_THRESHOLD, "unknown width method");
    *width = half_width_e2(scan->value, method == SPDC_WIDTH_GAUSSIAN_FIT ? WidthMethod::gaussian_fit
                                                                          : WidthMethod::threshold_crossing)
                 .width;
  });
}

spdc_status spdc_measure_widths(const spdc_scenario* scenario, spdc_mode mode, int samples, int threads,
                                spdc_widths* out) {
  return guarded([&] {
    require(scenario != nullptr && out != nullptr, "null argument");
    const auto w = measure_widths(scenario->value, to_mode(mode), {threads, samples, {}, {}});
    *out = {w.w_x, w.w_y, w.ellipticity, w.peak.x, w.peak.y, w.max_convergence};
  });
}

spdc_status spdc_sweep_pump_width(const spdc_scenario* scenario, const double* values, size_t count, spdc_mode mode,
                                  int samples, int threads, int include_singles, spdc_table** out) {
  return guarded([&] {
    require(scenario != nullptr && out != nullptr, "null argument");
    require(count > 0 && values != nullptr, "empty value list");
    const RateMode m = to_mode(mode);
    auto rows = sweep_pump_width(scenario->value, {values, count}, m, {threads, samples, include_singles != 0});
    *out = new spdc_table{scenario->value.label, m, std::move(rows)};
  });
}

spdc_status spdc_sweep_pump_bandwidth(const spdc_scenario* scenario, const double* values, size_t count,
                                      int samples, int threads, spdc_table** out) {
  return guarded([&] {
    require(scenario != nullptr && out != nullptr, "null argument");
    require(count > 0 && values != nullptr, "empty value list");
    auto rows = sweep_pump_bandwidth(scenario->value, {values, count}, {threads, samples, false});
    *out = new spdc_table{scenario->value.label, RateMode::integrated, std::move(rows)};
  });
}

void spdc_table_free(spdc_table* table) { delete table; }

size_t spdc_table_rows(const spdc_table* table) {
  if (table == nullptr) return 0;
  return std::visit([](const auto& rows) { return rows.size(); }, table->rows);
}

spdc_status spdc_table_row(const spdc_table* table, size_t index, spdc_widths* out, double* parameter) {
  return guarded([&] {
    require(table != nullptr && out != nullptr, "null argument");
    require(index < spdc_table_rows(table), "row index out of range");
    std::visit(
        [&](const auto& rows) {
          const auto& r = rows[index];
          *out = {r.w_x, r.w_y, r.ellipticity, 0.0, 0.0, r.max_convergence};
          if (parameter == nullptr) return;
          if constexpr (std::is_same_v<std::decay_t<decltype(r)>, PumpWidthRow>) {
            *parameter = r.w0;
          } else {
            *parameter = r.fwhm;
          }
        },
        table->rows);
  });
}

double spdc_table_max_convergence(const spdc_table* table) {
  if (table == nullptr) return 0.0;
  double worst = 0.0;
  std::visit(
      [&](const auto& rows) {
        for (const auto& r : rows) worst = std::max(worst, r.max_convergence);
      },
      table->rows);
  return worst;
}

spdc_status spdc_table_csv(const spdc_table* table, char** out) {
  return guarded([&] {
    require(table != nullptr && out != nullptr, "null argument");
    if (const auto* rows = std::get_if<std::vector<PumpWidthRow>>(&table->rows)) {
      *out = copy_string(pump_width_csv(table->label, table->mode, *rows));
    } else {
      *out = copy_string(pump_bandwidth_csv(table->label, std::get<std::vector<BandwidthRow>>(table->rows)));
    }
  });
}

}  // extern "C"
