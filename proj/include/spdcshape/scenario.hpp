#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "spdcshape/biphoton.hpp"
#include "spdcshape/detection.hpp"

namespace spdcshape {

/*!
 * Everything needed to simulate one experiment, in SI units.
 *
 * On disk a scenario is a JSON document whose keys carry their units
 * (`w0_um`, `length_mm`, `phi1_deg`, ...). Unknown keys are rejected; missing
 * keys take the defaults of the fig3b preset.
 */
struct Scenario {
  std::string label = "custom";
  Geometry geometry;
  PumpConfig pump;
  DetectionConfig detection;
  RateQuadrature quadrature;

  void validate() const;
};

std::vector<std::string> preset_names();
Scenario preset(const std::string& name);

Scenario scenario_from_json(std::string_view text);
Scenario load_scenario_file(const std::string& path);

// Resolve a reference: an existing file path, then <$SPDCSHAPE_PRESET_DIR>/<ref>.json,
// then a built-in preset name.
Scenario resolve_scenario(const std::string& ref);

// Config document (reloadable by scenario_from_json). Values are written with
// 14 significant digits so emit -> reload -> emit is a fixed point.
std::string scenario_to_json(const Scenario& scenario);

// Config document plus the SI-resolved values and derived quantities.
std::string report_json(const Scenario& scenario);

inline constexpr const char* kPresetDirEnv = "SPDCSHAPE_PRESET_DIR";

}  // namespace spdcshape
