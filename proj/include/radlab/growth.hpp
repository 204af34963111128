#pragma once

#include <functional>
#include <optional>
#include <string>

#include "radlab/stationary_radial.hpp"

namespace radlab {

/// Radial initial growth g̃(r) = e^{γ(r)} − 1, described by γ so that huge
/// values stay representable. γ is the W-variable of g̃.
struct GrowthFunction {
  std::function<double(double)> gamma;
  std::optional<double> beta;   // declared γ(r) ~ K r^β
  std::optional<double> coeff;  // K
  std::string description;

  double log1p_value(double r) const { return gamma(r); }

  /// γ(r) = K r^β with the asymptotic declared.
  static GrowthFunction power_law(double K, double beta);
  /// γ(r) = e^r, the super-threshold example of the α = 2 remark.
  static GrowthFunction exponential();
  static GrowthFunction zero();
  /// γ taken from a stationary profile (Hermite interpolation of W).
  static GrowthFunction from_profile(const RadialProfile& profile);
};

}  // namespace radlab
