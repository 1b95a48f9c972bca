#pragma once

#include <functional>
#include <span>
#include <vector>

#include "spdcshape/units.hpp"

namespace spdcshape {

enum class Rule { midpoint, gauss_legendre };

struct AxisSpec {
  int nodes = 1;
  double lower = 0.0;
  double upper = 1.0;
  Rule rule = Rule::gauss_legendre;
};

struct QuadratureSpec {
  std::vector<AxisSpec> axes;
  double threshold = 1e-3;  // relative convergence threshold

  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double convergence_estimate = 0.0;  // |I_n - I_{n/2}| / max(|I_n|, tiny)
  bool converged = true;
};

struct QuadratureNode {
  double x = 0.0;
  double weight = 0.0;
};

struct DiscNode {
  Position offset;  // relative to the disc centre
  double weight = 0.0;
};

// Node count used for the coarse companion rule of the convergence estimate.
constexpr int halved_nodes(int n) { return n > 1 ? n / 2 : 1; }

std::vector<QuadratureNode> axis_nodes(const AxisSpec& axis);

// Tensor-product rule over all axes of `spec`. The sum is accumulated in a
// fixed order with compensated summation, so the result does not depend on
// who calls it or how often.
QuadratureResult integrate(const std::function<double(std::span<const double>)>& f, const QuadratureSpec& spec);

// Polar product rule over a disc of the given diameter: Gauss-Legendre in
// radius (weight r), midpoint in angle. Weights sum to the disc area; a zero
// diameter collapses to the centre with weight 1.
std::vector<DiscNode> disc_grid(double diameter, int radial_nodes, int angular_nodes);

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace spdcshape
