#pragma once

#include <span>
#include <string>
#include <vector>

#include "radlab/nonlinearity.hpp"

namespace radlab {

enum class ProfileKind { Shooting, AprioriBound, BoundaryBlowup };

/// Radial stationary profile stored in W = ln(1+V).
struct RadialProfile {
  std::vector<double> radii;
  std::vector<double> w_values;
  std::vector<double> dw_values;
  int dimension = 1;
  double center_value = 0.0;  // V(0)
  ProfileKind kind = ProfileKind::Shooting;

  /// V(r_j) saturated at 1e300.
  double v_clipped(std::size_t j) const;
  /// Cubic Hermite interpolation of W inside the grid.
  double w_at(double r) const;
};

std::vector<double> uniform_radii(double r_max, std::size_t intervals);

/// State (W, W_r) of the radial equation at a radius.
struct RadialState {
  double r = 0.0;
  double w = 0.0;
  double p = 0.0;
};

struct ShootOptions {
  double rel_tol = 1e-9;
  double w_stop = 1e300;       // stop (without error) once W exceeds this value
  bool throw_on_stop = true;   // w_stop == 1e300 always throws
};

/// Result of a raw integration: states at every grid point reached.
struct ShootResult {
  std::vector<RadialState> states;
  bool stopped = false;        // W crossed w_stop before the last grid point
  double stop_radius = 0.0;
  std::size_t steps = 0;
  std::size_t rejected = 0;
};

/// Integrates W'' + W'^2 + (N-1)/r W' = (1 - e^{-W}) k(W) from W(0) = w0,
/// W'(0) = 0 through the increasing grid (grid[0] must be 0).
ShootResult integrate_radial(const NonlinearitySpec& spec, double w0, int N, std::span<const double> grid,
                             const ShootOptions& opt = {});

/// Continues the radial equation from a regular state to radius r_end.
RadialState advance_radial(const NonlinearitySpec& spec, int N, RadialState from, double r_end,
                           double rel_tol = 1e-9);

RadialProfile shoot_V(const NonlinearitySpec& spec, double a, int N, double r_max, std::span<const double> grid,
                      const Tolerances& tol = {});
RadialProfile shoot_V(const NonlinearitySpec& spec, double a, int N, double r_max, std::size_t intervals = 1000,
                      const Tolerances& tol = {});
/// Same with center data given as W(0) = ln(1+a).
RadialProfile shoot_W(const NonlinearitySpec& spec, double w0, int N, std::span<const double> grid,
                      const Tolerances& tol = {});

/// F_b(v) = ∫_b^v ds/√H(s) evaluated at v = e^log_v.
double keller_osserman_distance(const NonlinearitySpec& spec, double b, double log_v, double rel_tol = 1e-12);
/// ∫_v^∞ ds/√H(s) at v = e^log_v; +inf when the integral diverges.
double keller_osserman_tail(const NonlinearitySpec& spec, double log_v, double rel_tol = 1e-12);

/// ln V̄_b(R): the root of F_b(v) = √2 R. +inf when √2 R reaches F_b(∞).
double apriori_bound_log(const NonlinearitySpec& spec, double b, double R, const Tolerances& tol = {});
double apriori_bound(const NonlinearitySpec& spec, double b, double R, const Tolerances& tol = {});

struct BoundaryBlowupResult {
  RadialProfile profile;                      // largest boundary value
  std::vector<RadialProfile> profiles;        // one per boundary value
  std::vector<double> boundary_values;
  std::vector<double> center_values;          // v_{m,k}(0)
  std::vector<double> cauchy_differences;     // sup |V_{k_{i+1}} - V_{k_i}| on [0, 0.9 m]
  std::vector<double> cauchy_differences_w;   // same in W
};

/// Solutions of the stationary problem in B_m with boundary values k, found
/// by bisection on the shooting parameter.
BoundaryBlowupResult boundary_blowup_profile(const NonlinearitySpec& spec, double m, int N,
                                             std::span<const double> k_list, std::size_t intervals = 400,
                                             const Tolerances& tol = {});

struct LowerBoundCheck {
  double r = 0.0;
  double lhs = 0.0;  // ∫_{v(r)}^∞ ds/√H
  double rhs = 0.0;  // √(2/N) (m - r)
  bool holds = false;
};

/// Evaluates ∫_{v(r)}^∞ ds/√H(s) ≥ √(2/N)(m − r) on a boundary blow-up
/// profile at the requested radii.
std::vector<LowerBoundCheck> check_boundary_lower_bound(const NonlinearitySpec& spec, const RadialProfile& profile,
                                                        double m, std::span<const double> radii,
                                                        double slack = 1e-9);

struct FitReport {
  double exponent_hat = 0.0;     // slope of ln W vs ln r (or of ln W vs r when alpha = 2)
  double constant_hat = 0.0;     // exp(mean(ln W − target·ln r)); for alpha = 2, exp(intercept)
  double free_constant = 0.0;    // exp(intercept) of the two-parameter fit
  double target_exponent = 0.0;
  double target_constant = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::size_t points = 0;
  // Fit of W^{1/target} = κ (r + shift), which absorbs the lower-order term.
  double linearized_constant = 0.0;  // κ^target
  double shift = 0.0;
  bool log_linear = false;           // alpha = 2 branch
};

/// Least-squares check of the large-r growth of W over the last tenth of the
/// radial range.
FitReport verify_asymptotics(const RadialProfile& profile, double alpha);

double growth_constant(double alpha);  // ((2-α)/2)^{2/(2-α)}

}  // namespace radlab
