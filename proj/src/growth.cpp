#include "radlab/growth.hpp"

#include <cmath>
#include <memory>

namespace radlab {

GrowthFunction GrowthFunction::power_law(double K, double beta) {
  if (!(K >= 0.0) || !(beta > 0.0)) throw DomainError("power-law growth needs K >= 0 and beta > 0");
  GrowthFunction g;
  g.gamma = [K, beta](double r) { return K * std::pow(std::abs(r), beta); };
  g.beta = beta;
  g.coeff = K;
  g.description = "gamma(r) = " + std::to_string(K) + " r^" + std::to_string(beta);
  return g;
}

GrowthFunction GrowthFunction::exponential() {
  GrowthFunction g;
  g.gamma = [](double r) { return std::exp(r); };
  g.description = "gamma(r) = exp(r)";
  return g;
}

GrowthFunction GrowthFunction::zero() {
  GrowthFunction g;
  g.gamma = [](double) { return 0.0; };
  g.beta = 0.0;
  g.coeff = 0.0;
  g.description = "zero";
  return g;
}

GrowthFunction GrowthFunction::from_profile(const RadialProfile& profile) {
  auto shared = std::make_shared<const RadialProfile>(profile);
  GrowthFunction g;
  g.gamma = [shared](double r) { return shared->w_at(std::abs(r)); };
  g.description = "stationary profile, center " + std::to_string(profile.center_value);
  return g;
}

}  // namespace radlab
