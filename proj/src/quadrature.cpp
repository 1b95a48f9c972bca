#include "spdcshape/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "spdcshape/error.hpp"

namespace spdcshape {

void QuadratureSpec::validate() const {
  if (axes.empty()) throw Error(ErrorKind::invalid_argument, "quadrature spec needs at least one axis");
  if (axes.size() > 6) throw Error(ErrorKind::invalid_argument, "quadrature spec supports at most 6 axes");
  for (const auto& a : axes) {
    if (a.nodes < 1) throw Error(ErrorKind::invalid_argument, "quadrature axis needs >= 1 node");
    if (!(a.upper > a.lower)) throw Error(ErrorKind::invalid_argument, "quadrature window must be nonempty");
  }
  if (!(threshold > 0.0)) throw Error(ErrorKind::invalid_argument, "convergence threshold must be positive");
}

std::vector<QuadratureNode> axis_nodes(const AxisSpec& axis) {
  std::vector<QuadratureNode> nodes(static_cast<std::size_t>(axis.nodes));
  if (axis.rule == Rule::midpoint) {
    const double h = (axis.upper - axis.lower) / axis.nodes;
    for (int k = 0; k < axis.nodes; ++k) nodes[k] = {axis.lower + (k + 0.5) * h, h};
    return nodes;
  }
  // gsl returns nodes ordered from the centre outwards; sort ascending for a
  // stable, readable ordering.
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
      gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(axis.nodes)), &gsl_integration_glfixed_table_free);
  if (!table) throw Error(ErrorKind::invalid_argument, "failed to build Gauss-Legendre table");
  for (int k = 0; k < axis.nodes; ++k) {
    double x = 0.0;
    double w = 0.0;
    gsl_integration_glfixed_point(axis.lower, axis.upper, static_cast<std::size_t>(k), &x, &w, table.get());
    nodes[k] = {x, w};
  }
  std::sort(nodes.begin(), nodes.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
  return nodes;
}

namespace {

double tensor_sum(const std::function<double(std::span<const double>)>& f,
                  const std::vector<std::vector<QuadratureNode>>& grids) {
  const std::size_t dims = grids.size();
  std::vector<std::size_t> idx(dims, 0);
  std::vector<double> point(dims);
  CompensatedSum sum;
  for (;;) {
    double weight = 1.0;
    for (std::size_t d = 0; d < dims; ++d) {
      point[d] = grids[d][idx[d]].x;
      weight *= grids[d][idx[d]].weight;
    }
    const double v = f(point);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "non-finite integrand at (";
      for (std::size_t d = 0; d < dims; ++d) msg << (d ? ", " : "") << point[d];
      msg << ")";
      throw Error(ErrorKind::non_finite, msg.str());
    }
    sum.add(weight * v);
    std::size_t d = dims;
    while (d > 0) {
      --d;
      if (++idx[d] < grids[d].size()) break;
      idx[d] = 0;
      if (d == 0) return sum.value();
    }
  }
}

}  // namespace

QuadratureResult integrate(const std::function<double(std::span<const double>)>& f, const QuadratureSpec& spec) {
  spec.validate();
  std::vector<std::vector<QuadratureNode>> fine;
  std::vector<std::vector<QuadratureNode>> coarse;
  for (const auto& a : spec.axes) {
    fine.push_back(axis_nodes(a));
    AxisSpec half = a;
    half.nodes = halved_nodes(a.nodes);
    coarse.push_back(axis_nodes(half));
  }
  QuadratureResult r;
  r.value = tensor_sum(f, fine);
  const double rough = tensor_sum(f, coarse);
  r.convergence_estimate =
      std::abs(r.value - rough) / std::max(std::abs(r.value), std::numeric_limits<double>::min());
  r.converged = r.convergence_estimate <= spec.threshold;
  return r;
}

std::vector<DiscNode> disc_grid(double diameter, int radial_nodes, int angular_nodes) {
  if (!(diameter >= 0.0)) throw Error(ErrorKind::invalid_argument, "disc diameter must be >= 0");
  if (radial_nodes < 1 || angular_nodes < 1) throw Error(ErrorKind::invalid_argument, "disc grid needs >= 1 node");
  if (diameter == 0.0) return {{{0.0, 0.0}, 1.0}};
  const auto radii = axis_nodes({radial_nodes, 0.0, diameter / 2.0, Rule::gauss_legendre});
  const double dtheta = 2.0 * kPi / angular_nodes;
  std::vector<DiscNode> nodes;
  nodes.reserve(radii.size() * static_cast<std::size_t>(angular_nodes));
  for (const auto& r : radii) {
    for (int j = 0; j < angular_nodes; ++j) {
      const double theta = (j + 0.5) * dtheta;
      nodes.push_back({{r.x * std::cos(theta), r.x * std::sin(theta)}, r.weight * r.x * dtheta});
    }
  }
  return nodes;
}

}  // namespace spdcshape
