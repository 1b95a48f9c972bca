#include "spdcshape/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "spdcshape/error.hpp"

namespace spdcshape {

namespace {

constexpr int kBandSamples = 256;
// Pairs whose envelope exponent exceeds this contribute < e^-60 and are skipped.
constexpr double kNegligibleExponent = 60.0;

double fwhm_to_sigma(double fwhm) { return fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2)); }

// Angular-frequency interval covering lambda_c +- half_width in wavelength.
std::pair<double, double> wavelength_band_to_omega(double center, double half_width) {
  const double shortest = std::max(center - half_width, center * 1e-3);
  return {angular_frequency(center + half_width), angular_frequency(shortest)};
}

int scale_count(int n, double factor) { return std::max(1, static_cast<int>(std::ceil(n * factor))); }

}  // namespace

void DetectionConfig::validate() const {
  if (!(focal_length > 0.0)) throw Error(ErrorKind::config, "focal length must be positive");
  if (!(filter_center_s > 0.0) || !(filter_center_i > 0.0)) {
    throw Error(ErrorKind::config, "filter centre wavelengths must be positive");
  }
  if (filter_fwhm && !(*filter_fwhm > 0.0)) throw Error(ErrorKind::config, "filter FWHM must be positive or none");
  if (!(pinhole_diameter_s >= 0.0) || !(pinhole_diameter_i >= 0.0)) {
    throw Error(ErrorKind::config, "pinhole diameters must be >= 0");
  }
  if (!(singles_half_window > 0.0)) throw Error(ErrorKind::config, "singles window must be positive");
}

void RateQuadrature::validate() const {
  for (const auto* s : {&pump_frequency, &signal_frequency}) {
    if (s->nodes < 1) throw Error(ErrorKind::config, "frequency axes need >= 1 node");
    if (!(s->sigmas > 0.0)) throw Error(ErrorKind::config, "frequency window sigmas must be positive");
  }
  if (!(unfiltered_half_window > 0.0)) throw Error(ErrorKind::config, "unfiltered window must be positive");
  if (pinhole_radial < 1 || pinhole_angular < 1) throw Error(ErrorKind::config, "pinhole grid needs >= 1 node");
  if (singles_nodes < 1) throw Error(ErrorKind::config, "singles grid needs >= 1 node");
  if (!(threshold > 0.0)) throw Error(ErrorKind::config, "convergence threshold must be positive");
  if (!(envelope_cutoff > 0.0)) throw Error(ErrorKind::config, "envelope cutoff must be positive");
}

RateQuadrature RateQuadrature::scaled(double factor) const {
  if (!(factor > 0.0)) throw Error(ErrorKind::invalid_argument, "quadrature scale must be positive");
  RateQuadrature q = *this;
  q.pump_frequency.nodes = scale_count(q.pump_frequency.nodes, factor);
  q.signal_frequency.nodes = scale_count(q.signal_frequency.nodes, factor);
  q.pinhole_radial = scale_count(q.pinhole_radial, factor);
  q.pinhole_angular = scale_count(q.pinhole_angular, factor);
  q.singles_nodes = scale_count(q.singles_nodes, factor);
  return q;
}

RateQuadrature RateQuadrature::halved() const {
  RateQuadrature q = *this;
  q.pump_frequency.nodes = halved_nodes(q.pump_frequency.nodes);
  q.signal_frequency.nodes = halved_nodes(q.signal_frequency.nodes);
  q.pinhole_radial = halved_nodes(q.pinhole_radial);
  q.pinhole_angular = halved_nodes(q.pinhole_angular);
  q.singles_nodes = halved_nodes(q.singles_nodes);
  return q;
}

Wavevector position_to_wavevector(Position x, double wavelength, double focal_length) {
  const double scale = 2.0 * kPi / (wavelength * focal_length);
  return {scale * x.x, scale * x.y};
}

double filter_transmission(double omega, double center_wavelength, std::optional<double> fwhm) {
  if (!fwhm) return 1.0;
  const double d = (vacuum_wavelength(omega) - center_wavelength) / *fwhm;
  return std::exp(-4.0 * std::numbers::ln2 * d * d);
}

double coincidence_point(const Geometry& geom, const PumpConfig& pump, const DetectionConfig& det, Position x1,
                         Position x2) {
  const double omega_s = geom.signal_omega();
  const double omega_i = geom.idler_omega();
  const auto k = detail::free_wavenumbers(geom, omega_s, omega_i);
  const auto& c = geom.crystal;
  const auto p = position_to_wavevector(x1, geom.signal_wavelength, det.focal_length);
  const auto q = position_to_wavevector(x2, geom.idler_wavelength, det.focal_length);
  const auto s = detail::project_arm(k.signal, p, std::cos(c.phi1), std::sin(c.phi1));
  const auto i = detail::project_arm(k.idler, q, std::cos(c.phi2), std::sin(c.phi2));
  const auto m = detail::combine_arms(k.pump, s, i);
  if (!m) return 0.0;
  const double spectral = pump.amplitude * pump_spectral_amplitude(pump, omega_s + omega_i);
  return detail::pair_intensity(spectral * spectral, pump.w0 * pump.w0 / 2.0, c.length / 2.0, p.x + q.x, *m);
}

RateIntegrator::RateIntegrator(const Geometry& geom, const PumpConfig& pump, const DetectionConfig& det,
                               const RateQuadrature& quad, Kind kind)
    : geom_(geom),
      pump_(pump),
      det_(det),
      quad_(quad),
      kind_(kind),
      cos1_(std::cos(geom.crystal.phi1)),
      sin1_(std::sin(geom.crystal.phi1)),
      cos2_(std::cos(geom.crystal.phi2)),
      sin2_(std::sin(geom.crystal.phi2)) {
  quad_.validate();
  const double omega_s0 = geom_.signal_omega();
  const double omega_i0 = geom_.idler_omega();

  // Pump spectrum, normalised to unit area so a vanishing bandwidth joins the
  // monochromatic limit continuously.
  if (pump_.monochromatic()) {
    const double a = pump_.amplitude;
    pump_nodes_.push_back({omega_s0 + omega_i0, a * a});
  } else {
    const double sigma = fwhm_to_sigma(pump_.bandwidth_fwhm_omega());
    const double centre = pump_.central_omega();
    const double reach = quad_.pump_frequency.sigmas * sigma;
    const double area = sigma * std::sqrt(2.0 * kPi);
    for (const auto& n : axis_nodes({quad_.pump_frequency.nodes, centre - reach, centre + reach,
                                     quad_.pump_frequency.rule})) {
      const double a = pump_.amplitude * pump_spectral_amplitude(pump_, n.x);
      pump_nodes_.push_back({n.x, n.weight * a * a / area});
    }
  }

  // Signal frequency window before clipping.
  idler_filtered_ = kind_ == Kind::coincidence && det_.filter_fwhm.has_value();
  const bool signal_filtered = det_.filter_fwhm.has_value();
  signal_collapsed_ = pump_.monochromatic() && !signal_filtered && !idler_filtered_;
  if (!signal_collapsed_) {
    if (signal_filtered) {
      const double reach = quad_.signal_frequency.sigmas * fwhm_to_sigma(*det_.filter_fwhm);
      std::tie(signal_lo_, signal_hi_) = wavelength_band_to_omega(det_.filter_center_s, reach);
    } else if (idler_filtered_) {
      signal_lo_ = 0.0;
      signal_hi_ = std::numeric_limits<double>::infinity();
    } else {
      std::tie(signal_lo_, signal_hi_) =
          wavelength_band_to_omega(geom_.signal_wavelength, quad_.unfiltered_half_window);
    }
    signal_reference_ = axis_nodes({quad_.signal_frequency.nodes, 0.0, 1.0, quad_.signal_frequency.rule});
  }

  // Transverse nodes.
  signal_points_ = disc_grid(det_.pinhole_diameter_s, quad_.pinhole_radial, quad_.pinhole_angular);
  if (kind_ == Kind::coincidence) {
    idler_points_ = disc_grid(det_.pinhole_diameter_i, quad_.pinhole_radial, quad_.pinhole_angular);
  } else {
    const double a = det_.singles_half_window;
    const auto side = axis_nodes({quad_.singles_nodes, -a, a, Rule::gauss_legendre});
    for (const auto& u : side) {
      for (const auto& v : side) idler_points_.push_back({{u.x, v.x}, u.weight * v.weight});
    }
  }
  for (const auto& n : signal_points_) signal_reach_ = std::max(signal_reach_, std::hypot(n.offset.x, n.offset.y));
  for (const auto& n : idler_points_) idler_reach_ = std::max(idler_reach_, std::hypot(n.offset.x, n.offset.y));
}

std::optional<std::pair<double, double>> RateIntegrator::envelope_band(double omega_p, Position x1,
                                                                       Position x2) const {
  double lo = signal_lo_;
  double hi = signal_hi_;
  if (idler_filtered_) {
    const double reach = quad_.signal_frequency.sigmas * fwhm_to_sigma(*det_.filter_fwhm);
    const auto [wi_lo, wi_hi] = wavelength_band_to_omega(det_.filter_center_i, reach);
    lo = std::max(lo, omega_p - wi_hi);
    hi = std::min(hi, omega_p - wi_lo);
  }
  hi = std::min(hi, omega_p * (1.0 - 1e-6));
  lo = std::max(lo, omega_p * 1e-6);
  if (!(hi > lo)) return std::nullopt;

  const auto& c = geom_.crystal;
  const double limit = quad_.envelope_cutoff / pump_.w0;
  const double step = (hi - lo) / (kBandSamples - 1);
  int first = -1;
  int last = -1;
  for (int k = 0; k < kBandSamples; ++k) {
    const double omega_s = lo + k * step;
    const double omega_i = omega_p - omega_s;
    double k_s = 0.0;
    double k_i = 0.0;
    try {
      k_s = omega_s * c.signal_dispersion.index(vacuum_wavelength(omega_s)) / kSpeedOfLight;
      k_i = omega_i * c.idler_dispersion.index(vacuum_wavelength(omega_i)) / kSpeedOfLight;
    } catch (const Error&) {
      continue;  // outside the dispersion model: no amplitude there
    }
    const double map_s = det_.map == WavevectorMap::frozen ? 2.0 * kPi / (geom_.signal_wavelength * det_.focal_length)
                                                            : omega_s / (kSpeedOfLight * det_.focal_length);
    const double map_i = det_.map == WavevectorMap::frozen ? 2.0 * kPi / (geom_.idler_wavelength * det_.focal_length)
                                                            : omega_i / (kSpeedOfLight * det_.focal_length);
    const double y_lo = cos1_ * map_s * (x1.y - signal_reach_) + cos2_ * map_i * (x2.y - idler_reach_);
    const double y_hi = cos1_ * map_s * (x1.y + signal_reach_) + cos2_ * map_i * (x2.y + idler_reach_);
    const double p_max = map_s * (std::hypot(x1.x, x1.y) + signal_reach_);
    const double q_max = map_i * (std::hypot(x2.x, x2.y) + idler_reach_);
    const double margin = (k_s - std::sqrt(std::max(0.0, k_s * k_s - p_max * p_max))) * std::abs(sin1_) +
                          (k_i - std::sqrt(std::max(0.0, k_i * k_i - q_max * q_max))) * std::abs(sin2_);
    const double g = k_s * sin1_ + k_i * sin2_;
    if (y_hi - g + margin >= -limit && y_lo - g - margin <= limit) {
      if (first < 0) first = k;
      last = k;
    }
  }
  if (first < 0) return std::nullopt;
  return std::pair{std::max(lo, lo + (first - 1) * step), std::min(hi, lo + (last + 1) * step)};
}

double RateIntegrator::pair_sum(double omega_s, double omega_i, Position x1, Position x2) const {
  detail::FreeWavenumbers k;
  try {
    k = detail::free_wavenumbers(geom_, omega_s, omega_i);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::domain) return 0.0;
    throw;
  }
  const double lambda_s = det_.map == WavevectorMap::frozen ? geom_.signal_wavelength : vacuum_wavelength(omega_s);
  const double lambda_i = det_.map == WavevectorMap::frozen ? geom_.idler_wavelength : vacuum_wavelength(omega_i);

  std::vector<detail::ArmProjection> idler;
  idler.reserve(idler_points_.size());
  for (const auto& n : idler_points_) {
    const Position x{x2.x + n.offset.x, x2.y + n.offset.y};
    idler.push_back(detail::project_arm(k.idler, position_to_wavevector(x, lambda_i, det_.focal_length), cos2_, sin2_));
  }

  const double w0_sq_half = pump_.w0 * pump_.w0 / 2.0;
  const double half_length = geom_.crystal.length / 2.0;
  CompensatedSum total;
  for (const auto& sn : signal_points_) {
    const Position x{x1.x + sn.offset.x, x1.y + sn.offset.y};
    const auto s =
        detail::project_arm(k.signal, position_to_wavevector(x, lambda_s, det_.focal_length), cos1_, sin1_);
    if (!s.propagating) continue;
    double inner = 0.0;
    for (std::size_t j = 0; j < idler.size(); ++j) {
      const auto& i = idler[j];
      const auto m = detail::combine_arms(k.pump, s, i);
      if (!m) continue;
      const double sum_x = s.tx + i.tx;
      if ((sum_x * sum_x + m->delta_0 * m->delta_0) * w0_sq_half > kNegligibleExponent) continue;
      inner += idler_points_[j].weight * detail::pair_intensity(1.0, w0_sq_half, half_length, sum_x, *m);
    }
    total.add(sn.weight * inner);
  }
  return total.value();
}

double RateIntegrator::signal_sum(double omega_p, Position x1, Position x2) const {
  if (signal_collapsed_) {
    // Monochromatic pump at omega_s0 + omega_i0: evaluate at the centrals exactly.
    return pair_sum(geom_.signal_omega(), geom_.idler_omega(), x1, x2);
  }
  const auto band = envelope_band(omega_p, x1, x2);
  if (!band) return 0.0;
  const auto [lo, hi] = *band;
  const double width = hi - lo;
  CompensatedSum sum;
  for (const auto& n : signal_reference_) {
    const double omega_s = lo + width * n.x;
    const double omega_i = omega_p - omega_s;
    double t = filter_transmission(omega_s, det_.filter_center_s, det_.filter_fwhm);
    if (idler_filtered_) t *= filter_transmission(omega_i, det_.filter_center_i, det_.filter_fwhm);
    if (t == 0.0) continue;
    sum.add(width * n.weight * t * pair_sum(omega_s, omega_i, x1, x2));
  }
  return sum.value();
}

double RateIntegrator::evaluate(Position x1, Position x2) const {
  CompensatedSum sum;
  for (const auto& n : pump_nodes_) sum.add(n.weight * signal_sum(n.omega, x1, x2));
  const double v = sum.value();
  if (!std::isfinite(v)) throw Error(ErrorKind::non_finite, "integrated rate is not finite");
  return v;
}

namespace {

RatePoint integrated(const Geometry& geom, const PumpConfig& pump, const DetectionConfig& det, Position x1,
                     Position x2, const RateQuadrature& quad, RateIntegrator::Kind kind) {
  const RateIntegrator fine(geom, pump, det, quad, kind);
  const RateIntegrator coarse(geom, pump, det, quad.halved(), kind);
  RatePoint r;
  r.x1 = x1;
  r.x2 = x2;
  r.rate = fine.evaluate(x1, x2);
  const double rough = coarse.evaluate(x1, x2);
  r.quadrature_estimate = std::abs(r.rate - rough) / std::max(std::abs(r.rate), std::numeric_limits<double>::min());
  if (r.rate == 0.0 && rough == 0.0) r.quadrature_estimate = 0.0;
  r.converged = r.quadrature_estimate <= quad.threshold;
  return r;
}

}  // namespace

RatePoint coincidence_integrated(const Geometry& geom, const PumpConfig& pump, const DetectionConfig& det,
                                 Position x1, Position x2, const RateQuadrature& quad) {
  return integrated(geom, pump, det, x1, x2, quad, RateIntegrator::Kind::coincidence);
}

RatePoint singles_rate(const Geometry& geom, const PumpConfig& pump, const DetectionConfig& det, Position x1,
                       const RateQuadrature& quad) {
  return integrated(geom, pump, det, x1, det.idler_position, quad, RateIntegrator::Kind::singles);
}

}  // namespace spdcshape
