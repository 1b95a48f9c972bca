#include "spdcshape/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spdcshape/analysis.hpp"
#include "spdcshape/error.hpp"

namespace spdcshape {

using Json = nlohmann::ordered_json;

namespace {

// Strict view of one JSON object: every key read is recorded and finish()
// rejects whatever is left.
class Section {
 public:
  Section(const Json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail("", "expected an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  const Json& raw(const std::string& key) {
    used_.insert(key);
    return node_.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<int>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  Section child(const std::string& key) {
    static const Json empty = Json::object();
    if (!has(key)) return Section(empty, join(key));
    return Section(raw(key), join(key));
  }

  void finish() const {
    for (const auto& item : node_.items()) {
      if (!used_.count(item.key())) fail(item.key(), "unknown key");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw Error(ErrorKind::config, "config key '" + join(key) + "': " + what);
  }

  std::string join(const std::string& key) const {
    if (path_.empty()) return key;
    if (key.empty()) return path_;
    return path_ + "." + key;
  }

 private:
  const Json& node_;
  std::string path_;
  std::set<std::string> used_;
};

DispersionModel read_dispersion(Section& s, const std::string& key, const std::string& fallback) {
  if (!s.has(key)) return DispersionModel::named(fallback);
  const auto& v = s.raw(key);
  if (v.is_string()) {
    try {
      return DispersionModel::named(v.get<std::string>());
    } catch (const Error& e) {
      s.fail(key, e.what());
    }
  }
  if (v.is_object()) {
    Section c(v, s.join(key));
    const double n = c.number("constant_index", 1.0);
    c.finish();
    if (!(n >= 1.0)) c.fail("constant_index", "refractive index must be >= 1");
    return DispersionModel::constant(n);
  }
  s.fail(key, "expected a model name or {\"constant_index\": n}");
}

Json write_dispersion(const DispersionModel& m) {
  if (m.is_constant()) {
    if (m.constant_index() == 1.0) return "vacuum";
    return Json{{"constant_index", m.constant_index()}};
  }
  return m.name();
}

Rule read_rule(Section& s, const std::string& key, Rule fallback) {
  if (!s.has(key)) return fallback;
  const auto name = s.text(key, "");
  if (name == "gauss-legendre") return Rule::gauss_legendre;
  if (name == "midpoint") return Rule::midpoint;
  s.fail(key, "expected \"gauss-legendre\" or \"midpoint\"");
}

const char* rule_name(Rule r) { return r == Rule::midpoint ? "midpoint" : "gauss-legendre"; }

RateQuadrature::Spectral read_spectral(Section s, RateQuadrature::Spectral fallback) {
  fallback.nodes = s.integer("nodes", fallback.nodes);
  fallback.rule = read_rule(s, "rule", fallback.rule);
  fallback.sigmas = s.number("sigmas", fallback.sigmas);
  s.finish();
  return fallback;
}

// Round to 14 significant digits; see scenario_to_json.
double tidy(double v) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.14g", v);
  return std::strtod(buf, nullptr);
}

Json config_document(const Scenario& sc) {
  const auto& c = sc.geometry.crystal;
  const auto& d = sc.detection;
  const auto& q = sc.quadrature;
  Json crystal = {{"length_mm", tidy(c.length * 1e3)},
                  {"pump_dispersion", write_dispersion(c.pump_dispersion)},
                  {"signal_dispersion", write_dispersion(c.signal_dispersion)},
                  {"idler_dispersion", write_dispersion(c.idler_dispersion)},
                  {"phi1_deg", tidy(rad_to_deg(c.phi1))},
                  {"phi2_deg", tidy(rad_to_deg(c.phi2))}};
  Json pump = {{"wavelength_nm", tidy(sc.pump.wavelength * 1e9)},
               {"w0_um", tidy(sc.pump.w0 * 1e6)},
               {"bandwidth_nm", tidy(sc.pump.bandwidth_fwhm * 1e9)},
               {"amplitude", tidy(sc.pump.amplitude)}};
  Json geometry = {{"signal_wavelength_nm", tidy(sc.geometry.signal_wavelength * 1e9)},
                   {"idler_wavelength_nm", tidy(sc.geometry.idler_wavelength * 1e9)}};
  Json detection = {
      {"focal_length_mm", tidy(d.focal_length * 1e3)},
      {"filter_signal_center_nm", tidy(d.filter_center_s * 1e9)},
      {"filter_idler_center_nm", tidy(d.filter_center_i * 1e9)},
      {"filter_fwhm_nm", d.filter_fwhm ? Json(tidy(*d.filter_fwhm * 1e9)) : Json("none")},
      {"pinhole_signal_um", tidy(d.pinhole_diameter_s * 1e6)},
      {"pinhole_idler_um", tidy(d.pinhole_diameter_i * 1e6)},
      {"idler_position_um", Json::array({tidy(d.idler_position.x * 1e6), tidy(d.idler_position.y * 1e6)})},
      {"wavevector_map", d.map == WavevectorMap::frozen ? "frozen" : "dispersed"},
      {"singles_half_window_um", tidy(d.singles_half_window * 1e6)}};
  auto spectral = [](const RateQuadrature::Spectral& s) {
    return Json{{"nodes", s.nodes}, {"rule", rule_name(s.rule)}, {"sigmas", tidy(s.sigmas)}};
  };
  Json quadrature = {{"pump_frequency", spectral(q.pump_frequency)},
                     {"signal_frequency", spectral(q.signal_frequency)},
                     {"unfiltered_half_window_nm", tidy(q.unfiltered_half_window * 1e9)},
                     {"pinhole_radial_nodes", q.pinhole_radial},
                     {"pinhole_angular_nodes", q.pinhole_angular},
                     {"singles_nodes", q.singles_nodes},
                     {"convergence_threshold", tidy(q.threshold)},
                     {"envelope_cutoff", tidy(q.envelope_cutoff)}};
  return Json{{"label", sc.label},     {"crystal", crystal},       {"pump", pump},
              {"geometry", geometry},  {"detection", detection},   {"quadrature", quadrature}};
}

Scenario from_document(const Json& doc) {
  Scenario sc;
  Section root(doc, "");
  sc.label = root.text("label", sc.label);

  {
    auto s = root.child("crystal");
    auto& c = sc.geometry.crystal;
    c.length = s.number("length_mm", 5.0) * 1e-3;
    c.pump_dispersion = read_dispersion(s, "pump_dispersion", "liio3-extraordinary");
    c.signal_dispersion = read_dispersion(s, "signal_dispersion", "liio3-ordinary");
    c.idler_dispersion = read_dispersion(s, "idler_dispersion", "liio3-ordinary");
    // Angles are resolved after the pump wavelength is known.
    auto angle = [&](const std::string& key) -> std::optional<double> {
      if (!s.has(key)) return std::nullopt;
      const auto& v = s.raw(key);
      if (v.is_number()) return deg_to_rad(v.get<double>());
      if (v.is_string() && v.get<std::string>() == "phase-matched") return std::nullopt;
      s.fail(key, "expected degrees or \"phase-matched\"");
    };
    const auto phi1 = angle("phi1_deg");
    const auto phi2 = angle("phi2_deg");
    s.finish();

    auto p = root.child("pump");
    sc.pump.wavelength = p.number("wavelength_nm", 405.0) * 1e-9;
    sc.pump.w0 = p.number("w0_um", 500.0) * 1e-6;
    sc.pump.bandwidth_fwhm = p.number("bandwidth_nm", 0.6) * 1e-9;
    sc.pump.amplitude = p.number("amplitude", 1.0);
    p.finish();

    if (!phi1 || !phi2) {
      double matched = 0.0;
      try {
        matched = degenerate_emission_angle(c, sc.pump.wavelength);
      } catch (const Error& e) {
        throw Error(ErrorKind::config, std::string("config key 'crystal.phi1_deg': phase-matched angle: ") + e.what());
      }
      c.phi1 = phi1.value_or(matched);
      c.phi2 = phi2.value_or(-matched);
    } else {
      c.phi1 = *phi1;
      c.phi2 = *phi2;
    }
  }

  {
    auto g = root.child("geometry");
    sc.geometry.signal_wavelength = g.number("signal_wavelength_nm", 810.0) * 1e-9;
    sc.geometry.idler_wavelength = g.number("idler_wavelength_nm", 810.0) * 1e-9;
    g.finish();
  }

  {
    auto d = root.child("detection");
    auto& det = sc.detection;
    det.focal_length = d.number("focal_length_mm", 250.0) * 1e-3;
    det.filter_center_s = d.number("filter_signal_center_nm", sc.geometry.signal_wavelength * 1e9) * 1e-9;
    det.filter_center_i = d.number("filter_idler_center_nm", sc.geometry.idler_wavelength * 1e9) * 1e-9;
    if (d.has("filter_fwhm_nm")) {
      const auto& v = d.raw("filter_fwhm_nm");
      if (v.is_string() && v.get<std::string>() == "none") {
        det.filter_fwhm.reset();
      } else if (v.is_number()) {
        det.filter_fwhm = v.get<double>() * 1e-9;
      } else {
        d.fail("filter_fwhm_nm", "expected nanometres or \"none\"");
      }
    }
    det.pinhole_diameter_s = d.number("pinhole_signal_um", 100.0) * 1e-6;
    det.pinhole_diameter_i = d.number("pinhole_idler_um", 150.0) * 1e-6;
    if (d.has("idler_position_um")) {
      const auto& v = d.raw("idler_position_um");
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        d.fail("idler_position_um", "expected [x, y] in micrometres");
      }
      det.idler_position = {v[0].get<double>() * 1e-6, v[1].get<double>() * 1e-6};
    }
    const auto map = d.text("wavevector_map", "frozen");
    if (map == "frozen") {
      det.map = WavevectorMap::frozen;
    } else if (map == "dispersed") {
      det.map = WavevectorMap::dispersed;
    } else {
      d.fail("wavevector_map", "expected \"frozen\" or \"dispersed\"");
    }
    det.singles_half_window = d.number("singles_half_window_um", 1000.0) * 1e-6;
    d.finish();
  }

  {
    auto q = root.child("quadrature");
    auto& quad = sc.quadrature;
    quad.pump_frequency = read_spectral(q.child("pump_frequency"), quad.pump_frequency);
    quad.signal_frequency = read_spectral(q.child("signal_frequency"), quad.signal_frequency);
    quad.unfiltered_half_window = q.number("unfiltered_half_window_nm", 40.0) * 1e-9;
    quad.pinhole_radial = q.integer("pinhole_radial_nodes", quad.pinhole_radial);
    quad.pinhole_angular = q.integer("pinhole_angular_nodes", quad.pinhole_angular);
    quad.singles_nodes = q.integer("singles_nodes", quad.singles_nodes);
    quad.threshold = q.number("convergence_threshold", quad.threshold);
    quad.envelope_cutoff = q.number("envelope_cutoff", quad.envelope_cutoff);
    q.finish();
  }
  root.finish();
  sc.validate();
  return sc;
}

// Built-in presets, written in the on-disk format so they round-trip exactly.
const std::map<std::string, std::string>& preset_documents() {
  static const std::map<std::string, std::string> docs = [] {
    auto experiment = [](const std::string& label, double w0_um, double bandwidth_nm) {
      Json doc = {{"label", label},
                  {"crystal",
                   {{"length_mm", 5},
                    {"pump_dispersion", "liio3-extraordinary"},
                    {"signal_dispersion", "liio3-ordinary"},
                    {"idler_dispersion", "liio3-ordinary"},
                    {"phi1_deg", "phase-matched"},
                    {"phi2_deg", "phase-matched"}}},
                  {"pump", {{"wavelength_nm", 405}, {"w0_um", w0_um}, {"bandwidth_nm", bandwidth_nm}}},
                  {"geometry", {{"signal_wavelength_nm", 810}, {"idler_wavelength_nm", 810}}},
                  {"detection",
                   {{"focal_length_mm", 250},
                    {"filter_fwhm_nm", 10},
                    {"pinhole_signal_um", 100},
                    {"pinhole_idler_um", 150}}}};
      return doc.dump();
    };
    std::map<std::string, std::string> m;
    m["fig1a"] = experiment("fig1a", 50, 0);
    m["fig1b"] = experiment("fig1b", 500, 0);
    m["fig3a"] = experiment("fig3a", 32, 0);
    m["fig3b"] = experiment("fig3b", 500, 0.6);
    m["fig4"] = experiment("fig4", 32, 0.6);
    m["vacuum"] = Json{{"label", "vacuum"},
                       {"crystal",
                        {{"pump_dispersion", "vacuum"},
                         {"signal_dispersion", "vacuum"},
                         {"idler_dispersion", "vacuum"},
                         {"phi1_deg", 0},
                         {"phi2_deg", 0}}},
                       {"pump", {{"w0_um", 500}, {"bandwidth_nm", 0}}}}
                      .dump();
    return m;
  }();
  return docs;
}

Json parse(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::config, std::string("config syntax: ") + e.what());
  }
}

Json nullable(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

void Scenario::validate() const {
  geometry.crystal.validate();
  pump.validate();
  detection.validate();
  quadrature.validate();
  if (!(geometry.signal_wavelength > 0.0) || !(geometry.idler_wavelength > 0.0)) {
    throw Error(ErrorKind::config, "signal/idler wavelengths must be positive");
  }
  const double lhs = 1.0 / pump.wavelength;
  const double rhs = 1.0 / geometry.signal_wavelength + 1.0 / geometry.idler_wavelength;
  if (std::abs(lhs - rhs) > 1e-9 * lhs) {
    throw Error(ErrorKind::config, "central wavelengths violate energy conservation 1/lp = 1/ls + 1/li");
  }
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, doc] : preset_documents()) names.push_back(name);
  return names;
}

Scenario preset(const std::string& name) {
  const auto& docs = preset_documents();
  const auto it = docs.find(name);
  if (it == docs.end()) throw Error(ErrorKind::config, "unknown preset '" + name + "'");
  return scenario_from_json(it->second);
}

Scenario scenario_from_json(std::string_view text) { return from_document(parse(text)); }

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config, "cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return scenario_from_json(buf.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

Scenario resolve_scenario(const std::string& ref) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::is_regular_file(ref, ec)) return load_scenario_file(ref);
  if (const char* dir = std::getenv(kPresetDirEnv); dir && *dir) {
    const auto candidate = fs::path(dir) / (ref + ".json");
    if (fs::is_regular_file(candidate, ec)) return load_scenario_file(candidate.string());
  }
  return preset(ref);
}

std::string scenario_to_json(const Scenario& scenario) { return config_document(scenario).dump(2) + "\n"; }

std::string report_json(const Scenario& sc) {
  const auto& c = sc.geometry.crystal;
  const auto& d = sc.detection;
  Json si = {
      {"crystal",
       {{"length_m", c.length}, {"phi1_rad", c.phi1}, {"phi2_rad", c.phi2}}},
      {"pump",
       {{"wavelength_m", sc.pump.wavelength},
        {"w0_m", sc.pump.w0},
        {"bandwidth_fwhm_m", sc.pump.bandwidth_fwhm},
        {"bandwidth_fwhm_rad_per_s", sc.pump.bandwidth_fwhm_omega()},
        {"central_omega_rad_per_s", sc.pump.central_omega()}}},
      {"geometry",
       {{"signal_wavelength_m", sc.geometry.signal_wavelength},
        {"idler_wavelength_m", sc.geometry.idler_wavelength}}},
      {"detection",
       {{"focal_length_m", d.focal_length},
        {"filter_fwhm_m", d.filter_fwhm ? Json(*d.filter_fwhm) : Json(nullptr)},
        {"pinhole_signal_m", d.pinhole_diameter_s},
        {"pinhole_idler_m", d.pinhole_diameter_i},
        {"idler_position_m", Json::array({d.idler_position.x, d.idler_position.y})}}}};

  double angle = std::nan("");
  try {
    angle = degenerate_emission_angle(c, sc.pump.wavelength);
  } catch (const Error&) {
  }
  double external = std::nan("");
  const double n_signal = c.signal_dispersion.index(sc.geometry.signal_wavelength);
  try {
    external = internal_to_external_angle(c.phi1, n_signal);
  } catch (const Error&) {
  }
  const double lnc = c.phi1 != 0.0 ? noncollinear_length(sc.pump.w0, c.phi1) : std::nan("");
  Json derived = {
      {"degenerate_emission_angle_rad", nullable(angle)},
      {"degenerate_emission_angle_deg", nullable(rad_to_deg(angle))},
      {"external_emission_angle_deg", nullable(rad_to_deg(external))},
      {"noncollinear_length_m", nullable(lnc)},
      {"thin_crystal_width_m", thin_crystal_width(sc.geometry.signal_wavelength, d.focal_length, sc.pump.w0)},
      {"refractive_index",
       {{"pump", c.pump_dispersion.index(sc.pump.wavelength)},
        {"signal", n_signal},
        {"idler", c.idler_dispersion.index(sc.geometry.idler_wavelength)}}}};
  Json doc = {{"scenario", config_document(sc)}, {"resolved_si", si}, {"derived", derived}};
  return doc.dump(2) + "\n";
}

}  // namespace spdcshape
