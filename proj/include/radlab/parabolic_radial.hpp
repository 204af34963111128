#pragma once

#include <functional>
#include <string>
#include <vector>

#include "radlab/growth.hpp"
#include "radlab/nonlinearity.hpp"

namespace radlab {

/// Uniform radial grid 0 = r_0 < ... < r_J = R_out.
struct RadialGrid {
  std::vector<double> radii;
  int dimension = 1;

  static RadialGrid uniform(double R_out, std::size_t intervals, int N);
  /// Grid on [0, R_out] with the given spacing; R_out must be a multiple of it.
  static RadialGrid with_spacing(double R_out, double spacing, int N);
  double spacing() const { return radii[1] - radii[0]; }
  std::size_t size() const { return radii.size(); }
  double outer() const { return radii.back(); }
};

enum class InitialKind { Truncated, Capped, Raw, Values };

/// Initial data, sampled into W = ln(1+u) on a grid.
struct InitialData {
  InitialKind kind = InitialKind::Raw;
  GrowthFunction g;
  double n = 0.0;              // truncation radius
  double a = 0.0;              // cap profile center value
  std::vector<double> values;  // explicit W values (Values kind)

  static InitialData truncated(GrowthFunction g, double n);
  static InitialData capped(GrowthFunction g, double a);
  static InitialData raw(GrowthFunction g);
  static InitialData from_w(std::vector<double> w);

  std::vector<double> sample(const NonlinearitySpec& spec, const RadialGrid& grid, const Tolerances& tol = {}) const;
};

/// Dirichlet data at R_out, in W units.
struct Boundary {
  bool is_constant = true;
  double constant = 0.0;
  std::function<double(double)> trace;
  std::string description;

  static Boundary constant_w(double w);
  static Boundary constant_u(double u);
  static Boundary trace_w(std::function<double(double)> w_of_t, std::string description = "trace");
  double at(double t) const { return is_constant ? constant : trace(t); }
};

struct TimeStepping {
  double dt_first = 1e-6;
  double ratio = 1.3;
  double dt_max = 1e-3;
};

/// Internal step times: geometric from dt_first with the given ratio, capped
/// at dt_max, with every requested output time hit exactly.
std::vector<double> geometric_time_grid(const std::vector<double>& outputs, const TimeStepping& ts);

struct EvolutionStats {
  std::size_t steps = 0;
  std::size_t newton_iterations = 0;
  std::size_t max_newton_iterations = 0;
  std::size_t damped_steps = 0;
  std::size_t violations = 0;     // converged W below −1e-10 before clipping
  double worst_negative = 0.0;
};

/// Values W(t_i, r_j) = ln(1 + u) at the requested output times.
struct EvolutionField {
  std::vector<double> times;
  RadialGrid grid;
  std::vector<std::vector<double>> values;
  Boundary boundary;
  std::string scheme_tag;
  EvolutionStats stats;

  /// u saturated at 1e300.
  double u(std::size_t i, std::size_t j) const;
  std::size_t time_index(double t) const;
};

EvolutionField evolve(const NonlinearitySpec& spec, const RadialGrid& grid, const InitialData& init,
                      const Boundary& boundary, const std::vector<double>& times, const TimeStepping& ts = {},
                      const Tolerances& tol = {});

/// Largest signed difference max(W1 − W2) over all stored entries.
double check_comparison(const EvolutionField& f1, const EvolutionField& f2);

struct SchemeOptions {
  int dimension = 1;
  double spacing = 0.02;
  double monitor_radius = 1.0;
  TimeStepping time;
  unsigned threads = 1;
  bool domain_check = true;       // whole-space scheme: rerun at 1.5 R_out
  double domination_search = 60;  // search range for the domination radius
  Tolerances tol;
};

struct SchemeSequence {
  std::string scheme_tag;
  std::vector<double> n_list;
  std::vector<EvolutionField> fields;
  double discretization_tol = 0.0;        // h²
  double monotone_margin = 0.0;           // worst signed step against the expected direction
  std::vector<double> cauchy_differences; // sup over monitor region and times, W units
  double domain_influence = 0.0;
  double excess_over_flat = 0.0;          // max (W − ln(1+Φ_∞(t))), W units
  double excess_over_profile = 0.0;       // max (W − W_a)
  double subsolution_excess = 0.0;        // max ln(V_a − u) − ln Φ_∞(t)
  double domination_radius = 0.0;         // r_a
  bool below_domination_radius = false;
  std::string to_json() const;
  const EvolutionField& limit() const { return fields.back(); }
};

SchemeSequence run_truncated_scheme(const NonlinearitySpec& spec, const GrowthFunction& g, const std::vector<double>& n_list,
                             double R_out, const std::vector<double>& times, const SchemeOptions& opt = {});

SchemeSequence run_capped_scheme(const NonlinearitySpec& spec, const GrowthFunction& g, double a,
                             const std::vector<double>& n_list, const std::vector<double>& times,
                             const SchemeOptions& opt = {});

struct SandwichResult {
  SchemeSequence lower;
  SchemeSequence upper;
  double lower_sandwich_margin = 0.0;  // min (W_lower − W_c), should be ≥ −tol
  double upper_sandwich_margin = 0.0;  // min (W_b − W_upper), should be ≥ −tol
};

SandwichResult run_sandwich_scheme(const NonlinearitySpec& spec, const GrowthFunction& g, double c, double b,
                               const std::vector<double>& n_list, const std::vector<double>& times,
                               const SchemeOptions& opt = {});

/// Discrete stationary profile with W(0) = ln(1+a): the exact steady state of
/// the scheme's difference operator, marched outward from the center. Agrees
/// with the shooting profile to O(h²).
std::vector<double> profile_on_grid(const NonlinearitySpec& spec, double a, const RadialGrid& grid,
                                    const Tolerances& tol = {});

}  // namespace radlab
