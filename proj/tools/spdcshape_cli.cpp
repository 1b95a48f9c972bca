// spdcshape: coincidence-map scans, parameter sweeps and scenario reports.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spdcshape/spdcshape.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitInternal = 1;

struct ScenarioDeleter {
  void operator()(spdc_scenario* s) const { spdc_scenario_free(s); }
};
struct ScanDeleter {
  void operator()(spdc_scan* s) const { spdc_scan_free(s); }
};
struct TableDeleter {
  void operator()(spdc_table* t) const { spdc_table_free(t); }
};
using ScenarioPtr = std::unique_ptr<spdc_scenario, ScenarioDeleter>;
using ScanPtr = std::unique_ptr<spdc_scan, ScanDeleter>;
using TablePtr = std::unique_ptr<spdc_table, TableDeleter>;

// Carries a library status out to main.
struct Failure {
  spdc_status status;
  std::string message;
};

void check(spdc_status status) {
  if (status != SPDC_OK) throw Failure{status, spdc_last_error()};
}

int exit_code(spdc_status status) {
  switch (status) {
    case SPDC_ERR_INVALID_ARGUMENT:
    case SPDC_ERR_CONFIG:
    case SPDC_ERR_DOMAIN:
    case SPDC_ERR_NO_PHASE_MATCHING:
    case SPDC_ERR_TOTAL_INTERNAL_REFLECTION:
      return kExitUsage;
    case SPDC_ERR_NON_FINITE:
    case SPDC_ERR_EVANESCENT:
    case SPDC_ERR_SCAN:
      return kExitNumerical;
    default:
      return kExitInternal;
  }
}

std::string take(char* text) {
  std::string s(text);
  spdc_string_free(text);
  return s;
}

struct Common {
  std::string scenario;
  std::string out;
  int threads = 1;
  double quadrature_scale = 1.0;
};

ScenarioPtr load(const Common& common) {
  if (common.scenario.empty()) throw Failure{SPDC_ERR_INVALID_ARGUMENT, "no scenario given"};
  spdc_scenario* raw = nullptr;
  check(spdc_scenario_resolve(common.scenario.c_str(), &raw));
  ScenarioPtr sc(raw);
  if (common.quadrature_scale != 1.0) check(spdc_scenario_scale_quadrature(sc.get(), common.quadrature_scale));
  return sc;
}

void emit(const Common& common, const std::string& text) {
  if (common.out.empty() || common.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream file(common.out, std::ios::binary);
  file << text;
  if (!file) throw Failure{SPDC_ERR_INVALID_ARGUMENT, "cannot write " + common.out};
}

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("scenario,--scenario", common.scenario, "Preset name or scenario JSON file");
  cmd->add_option("--out", common.out, "Output file (default: stdout)");
  cmd->add_option("--threads", common.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--quadrature-scale", common.quadrature_scale, "Multiply every quadrature node count")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial shape of SPDC photon pairs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", spdc_version());

  Common common;
  std::string axis = "x";
  std::string mode = "point";
  std::optional<double> range_um;
  int samples = 41;

  auto* scan = app.add_subcommand("scan", "Coincidence-rate cut through the peak, as CSV");
  add_common(scan, common);
  scan->add_option("--axis", axis, "Cut direction")->check(CLI::IsMember({"x", "y"}));
  scan->add_option("--mode", mode, "Rate model")->check(CLI::IsMember({"point", "integrated"}));
  scan->add_option("--range-um", range_um, "Half-range of the cut in um (default: automatic)")
      ->check(CLI::PositiveNumber);
  scan->add_option("--samples", samples, "Samples along the cut (>= 16)");

  std::string parameter;
  std::vector<double> values;
  bool no_singles = false;
  auto* sweep = app.add_subcommand("sweep", "Widths and ellipticity over a parameter, as CSV");
  add_common(sweep, common);
  sweep->add_option("--parameter", parameter, "pump_width (values in um) or pump_bandwidth (values in nm)")
      ->required();
  sweep->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');
  sweep->add_option("--mode", mode, "Rate model for pump_width sweeps")
      ->check(CLI::IsMember({"point", "integrated"}));
  sweep->add_option("--samples", samples, "Samples per cut (>= 16)");
  sweep->add_flag("--no-singles", no_singles, "Skip the singles x-width column");

  auto* report = app.add_subcommand("report", "Resolved scenario and derived quantities, as JSON");
  add_common(report, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const auto sc = load(common);
    const spdc_mode m = mode == "point" ? SPDC_MODE_POINT : SPDC_MODE_INTEGRATED;

    if (scan->parsed()) {
      spdc_scan* raw = nullptr;
      const double half_range = range_um ? *range_um * 1e-6 : 0.0;
      check(spdc_scan_cut(sc.get(), axis == "x" ? SPDC_AXIS_X : SPDC_AXIS_Y, m, half_range, samples, common.threads,
                          &raw));
      ScanPtr result(raw);
      char* csv = nullptr;
      check(spdc_scan_csv(result.get(), &csv));
      emit(common, take(csv));
      if (const size_t bad = spdc_scan_unconverged(result.get()); bad > 0) {
        std::cerr << "warning: " << bad << " of " << spdc_scan_size(result.get())
                  << " samples exceed the quadrature convergence threshold (see the convergence column)\n";
      }
    } else if (sweep->parsed()) {
      spdc_table* raw = nullptr;
      std::vector<double> si = values;
      if (parameter == "pump_width") {
        for (double& v : si) v *= 1e-6;
        check(spdc_sweep_pump_width(sc.get(), si.data(), si.size(), m, samples, common.threads, no_singles ? 0 : 1,
                                    &raw));
      } else if (parameter == "pump_bandwidth") {
        for (double& v : si) v *= 1e-9;
        check(spdc_sweep_pump_bandwidth(sc.get(), si.data(), si.size(), samples, common.threads, &raw));
      } else {
        throw Failure{SPDC_ERR_INVALID_ARGUMENT, "unknown sweep parameter '" + parameter +
                                                     "' (expected pump_width or pump_bandwidth)"};
      }
      TablePtr table(raw);
      char* csv = nullptr;
      check(spdc_table_csv(table.get(), &csv));
      emit(common, take(csv));
      if (spdc_table_max_convergence(table.get()) > 1e-3) {
        std::cerr << "warning: some cut samples exceed the quadrature convergence threshold\n";
      }
    } else {
      char* json = nullptr;
      check(spdc_scenario_report(sc.get(), &json));
      emit(common, take(json));
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return exit_code(f.status);
  }
  return kExitOk;
}
