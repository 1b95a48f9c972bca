#pragma once

#include <cmath>

#include "spdcshape/scenario.hpp"

namespace testing {

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

// Collinear toy: constant equal indices, zero angles.
inline spdcshape::Geometry vacuum_geometry(double n = 1.0) {
  spdcshape::Geometry g;
  g.crystal.pump_dispersion = spdcshape::DispersionModel::constant(n);
  g.crystal.signal_dispersion = spdcshape::DispersionModel::constant(n);
  g.crystal.idler_dispersion = spdcshape::DispersionModel::constant(n);
  return g;
}

}  // namespace testing
