#pragma once

#include <span>
#include <string>
#include <vector>

#include "radlab/nonlinearity.hpp"

namespace radlab {

/// Sampled solution of Φ' + Φ h(Φ) = 0, either from finite data or the
/// infinite-data solution. `log_values` holds ln Φ and is always finite;
/// `values` may saturate to +inf when Φ exceeds the double range.
struct FlatTrajectory {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> log_values;
  double initial_datum = 0.0;  // +inf for the infinite-data solution
  std::string description;
};

/// ∫_{e^lo}^{e^hi} ds/(s h(s)), the time the flat flow needs to go from e^hi
/// down to e^lo.
double flat_travel_time(const NonlinearitySpec& spec, double log_lo, double log_hi, double rel_tol = 1e-13);

/// G(v) = ∫_v^∞ ds/(s h(s)) at v = e^log_v.
double flat_time_from_infinity(const NonlinearitySpec& spec, double log_v, double rel_tol = 1e-13);

/// ln Φ_a(t) for data given as ln a; works for data far beyond the double range.
double solve_phi_log(const NonlinearitySpec& spec, double log_a, double t, const Tolerances& tol = {});

FlatTrajectory solve_phi(const NonlinearitySpec& spec, double a, std::span<const double> times,
                         const Tolerances& tol = {});

/// ln Φ_∞(t); requires the Osgood condition.
double solve_phi_infinity_log(const NonlinearitySpec& spec, double t, const Tolerances& tol = {});

/// Φ_∞(t); throws OverflowError when the value exceeds 1e300.
double solve_phi_infinity(const NonlinearitySpec& spec, double t, const Tolerances& tol = {});

FlatTrajectory solve_phi_infinity_trajectory(const NonlinearitySpec& spec, std::span<const double> times,
                                             const Tolerances& tol = {});

/// ∫_0^t h(Φ_a(s)) ds by quadrature over s, with data given as ln a.
double flat_absorption_integral(const NonlinearitySpec& spec, double log_a, double t, const Tolerances& tol = {});

}  // namespace radlab
