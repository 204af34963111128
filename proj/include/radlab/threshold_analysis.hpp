#pragma once

#include <string>
#include <vector>

#include "radlab/growth.hpp"
#include "radlab/nonlinearity.hpp"

namespace radlab {

struct CrossingResult {
  double radius = 0.0;      // last crossing of γ and W_n; 0 when γ dominates everywhere
  double gap_at_root = 0.0; // γ(r_n) − W_n(r_n)
  std::size_t crossings = 0;
};

/// Last radius where the growth γ meets the stationary profile W_n (center
/// value n), searched on [0, search_max].
CrossingResult compute_r_n(const GrowthFunction& g, const NonlinearitySpec& spec, double n, int N,
                           double search_max, std::size_t scan_intervals = 2000, const Tolerances& tol = {});

struct OmegaBound {
  double bound = 0.0;         // 2^{α/(α−1)} γ ∫_0^{tγ^{α−1}} (2+(α−1)τ)^{−α/(α−1)} dτ
  double crude = 0.0;         // γ^α t
  double tau_integral = 0.0;  // the τ-integral alone
};

/// Closed-form upper bound of ∫_0^t ln^α(ω(s)+1) ds for the flat solution
/// started at e^{γ} − 1. Requires t ≤ 1 and e^γ − 1 ≥ a0 (pass a0 ≤ 0 to skip
/// the data check).
OmegaBound omega_integral_bound(double gamma_rn, double alpha, double t, double a0 = 0.0);

/// Least a with Φ_a(1) ≥ 1, i.e. Φ_a/(Φ_a+1) ≥ 1/2 on [0, 1].
double compute_a0(const NonlinearitySpec& spec, const Tolerances& tol = {});

double erfc_complement(double x);
/// ln erfc(x), finite for every x.
double log_erfc(double x);

struct JBound {
  double log_bound = 0.0;       // ln of e^{−ω} g̃ erfc^N((r+x)/(2√t))
  double log_asymptotic = 0.0;  // ln of the large-argument form
  double difference = 0.0;      // log_bound − log_asymptotic
};

/// Lower bound for the far-field heat contribution. `log_g_rn` is ln g̃(r_n).
JBound J_n_lower_bound(double t, double x, double r_n, double log_g_rn, double omega_int, int N);

/// ln of the exact far-field term for N = 1:
/// e^{−ω} g̃ · ½[erfc((r−x)/(2√t)) + erfc((r+x)/(2√t))].
double log_J_exact_1d(double t, double x, double r_n, double log_g_rn, double omega_int);

double B_n_value(double t, double x, double r_n, double gamma_rn, double alpha, int N);
double t_star(double x, double r_n, double gamma_rn, double alpha, int N);
/// ν in B(t*, x) = r γ^{α/2} (γ^{1−α/2}/r − √N (1 + ν)).
double nu_n(double x, double r_n, double gamma_rn, double alpha, int N);

struct Verdict {
  bool dimension_threshold_exceeded = false;  // growth beyond K = N^{1/(2−α)} at the critical exponent
  bool growth_threshold_exceeded = false;     // growth beyond K = c_α
  double critical_exponent = 0.0;     // 2/(2−α)
  double dimension_constant = 0.0;    // N^{1/(2−α)}
  double growth_constant = 0.0;       // ((2−α)/2)^{2/(2−α)}
};

Verdict threshold_verdict(const GrowthFunction& g, double alpha, int N);

struct Alpha2Result {
  double value = 0.0;     // B(t, x)
  double t_max = 0.0;     // interior maximizer
  double at_max = 0.0;    // B(t_max, x)
  double leading = 0.0;   // γ − r γ √N
  double nu = 0.0;        // B(t_max) = γ − r γ (√N − ν)
};

Alpha2Result alpha2_B_n(double t, double x, double r_n, double gamma_rn, int N);

/// ln I_n for N = 1 by adaptive quadrature over |y| ≤ r_n with the growth
/// capped at γ(r_n). Returns −inf when the growth vanishes.
double I_n_quadrature(double t, double x, double r_n, const GrowthFunction& g, double omega_int, int N);

struct ThresholdRow {
  double r_n = 0.0;
  double gamma_rn = 0.0;
  double t_n = 0.0;
  double B_n = 0.0;
  double log_J = 0.0;
  double nu = 0.0;
};

struct ThresholdReport {
  std::vector<ThresholdRow> rows;
  Verdict verdict;
  double alpha = 0.0;
  int dimension = 1;
  double x = 0.0;

  std::string to_json() const;
  std::string to_csv() const;
};

/// Evaluates t_n, B_n(t_n, x), ln J_n and ν along the given radii.
ThresholdReport threshold_report(const GrowthFunction& g, double alpha, int N, const std::vector<double>& radii,
                                 double x = 0.0);

}  // namespace radlab
