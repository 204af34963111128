#include "radlab/threshold_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/tools/roots.hpp>
#include "json.hpp"

#include "radlab/scalar_ode.hpp"
#include "radlab/stationary_radial.hpp"

namespace radlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double toms748(const std::function<double(double)>& f, double lo, double hi, double flo, double fhi, double rel) {
  boost::uintmax_t iters = 200;
  auto stop = [rel](double a, double b) { return std::abs(b - a) <= rel * std::max({std::abs(a), std::abs(b), 1e-300}); };
  auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, stop, iters);
  return 0.5 * (r.first + r.second);
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

CrossingResult compute_r_n(const GrowthFunction& g, const NonlinearitySpec& spec, double n, int N,
                           double search_max, std::size_t scan_intervals, const Tolerances& tol) {
  if (!(n > 0.0)) throw DomainError("profile center value must be positive");
  if (!(search_max > 0.0)) throw DomainError("search range must be positive");
  const auto grid = uniform_radii(search_max, scan_intervals);
  const double w0 = std::log1p(n);
  ShootOptions opt;
  opt.rel_tol = tol.rk_rel;
  ShootResult shot = integrate_radial(spec, w0, N, grid, opt);
  std::vector<double> gap(grid.size());
  auto below = [&](std::size_t j) { return gap[j] < -1e-9 * std::max(1.0, shot.states[j].w); };
  for (std::size_t j = 0; j < grid.size(); ++j) gap[j] = g.gamma(grid[j]) - shot.states[j].w;
  CrossingResult res;
  if (below(grid.size() - 1)) {
    throw PreconditionError("growth does not dominate the stationary profile at the end of the search range (r=" +
                            std::to_string(search_max) + ")");
  }
  std::size_t last = grid.size();
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
    if (below(j) != below(j + 1)) ++res.crossings;
    if (below(j)) last = j;
  }
  if (last == grid.size()) return res;

  const RadialState from = shot.states[last];
  auto D = [&](double r) {
    if (r <= grid[last]) return gap[last];
    double w;
    if (from.r > 0.0) {
      w = advance_radial(spec, N, from, r, tol.rk_rel).w;
    } else {
      const std::vector<double> ends{0.0, r};
      w = integrate_radial(spec, w0, N, ends, opt).states.back().w;
    }
    return g.gamma(r) - w;
  };
  const double lo = grid[last], hi = grid[last + 1];
  const double flo = gap[last];
  const double fhi = D(hi);
  if (fhi == 0.0) {
    res.radius = hi;
    return res;
  }
  if (flo * fhi > 0.0) {
    res.radius = hi;
    res.gap_at_root = fhi;
    return res;
  }
  res.radius = toms748(D, lo, hi, flo, fhi, 0.5 * tol.crossing_rel);
  res.gap_at_root = D(res.radius);
  return res;
}

OmegaBound omega_integral_bound(double gamma_rn, double alpha, double t, double a0) {
  if (!(alpha > 1.0 && alpha <= 2.0)) throw DomainError("omega bound needs alpha in (1, 2]");
  if (!(t >= 0.0) || t > 1.0) throw DomainError("omega bound valid only for 0 <= t <= 1");
  if (!(gamma_rn > 0.0)) throw DomainError("omega bound needs gamma > 0");
  if (a0 > 0.0 && gamma_rn < std::log1p(a0)) {
    throw DomainError("omega bound valid only when the flat data exceeds a0 = " + std::to_string(a0));
  }
  OmegaBound b;
  const double q = 1.0 / (alpha - 1.0);
  const double T = t * std::pow(gamma_rn, alpha - 1.0);
  // (2 + (α−1)T)^{−q} = 2^{−q} (1 + (α−1)T/2)^{−q}
  const double decay = -std::expm1(-q * std::log1p(0.5 * (alpha - 1.0) * T));
  b.tau_integral = std::pow(2.0, -q) * decay;
  b.bound = 2.0 * gamma_rn * decay;
  b.crude = std::pow(gamma_rn, alpha) * t;
  return b;
}

double compute_a0(const NonlinearitySpec& spec, const Tolerances& tol) {
  if (solve_phi_infinity_log(spec, 1.0, tol) <= 0.0) {
    throw PreconditionError("no finite a0: the infinite-data flat solution is below 1 at t = 1");
  }
  auto f = [&](double x) { return solve_phi_log(spec, x, 1.0, tol); };
  double lo = 0.0, hi = 1.0;
  double flo = f(lo), fhi = f(hi);
  while (fhi < 0.0) {
    lo = hi;
    flo = fhi;
    hi *= 2.0;
    fhi = f(hi);
    if (hi > 1e6) throw BracketError("a0 bracket failed");
  }
  return std::exp(toms748(f, lo, hi, flo, fhi, 1e-12));
}

double erfc_complement(double x) { return std::erfc(x); }

double log_erfc(double x) {
  if (x < 6.0) return std::log(std::erfc(x));
  // erfc(x) = e^{-x²}/√π · 1/(x + (1/2)/(x + (2/2)/(x + (3/2)/(x + ...))))
  double f = x;
  for (int n = 80; n >= 1; --n) f = x + 0.5 * n / f;
  return -x * x - 0.5 * std::log(std::numbers::pi) - std::log(f);
}

JBound J_n_lower_bound(double t, double x, double r_n, double log_g_rn, double omega_int, int N) {
  if (!(t > 0.0) || !(r_n > 0.0)) throw DomainError("J bound needs t > 0 and r_n > 0");
  const double s = r_n + std::abs(x);
  JBound j;
  j.log_bound = -omega_int + log_g_rn + N * log_erfc(s / (2.0 * std::sqrt(t)));
  j.log_asymptotic = -omega_int + log_g_rn + 0.5 * N * std::log(4.0 * t / (std::numbers::pi * s * s)) -
                     N * s * s / (4.0 * t);
  j.difference = j.log_bound - j.log_asymptotic;
  return j;
}

double log_J_exact_1d(double t, double x, double r_n, double log_g_rn, double omega_int) {
  const double st = 2.0 * std::sqrt(t);
  const double ax = std::abs(x);
  const double l = log_add(log_erfc((r_n - ax) / st), log_erfc((r_n + ax) / st));
  return -omega_int + log_g_rn + l - std::log(2.0);
}

double B_n_value(double t, double x, double r_n, double gamma_rn, double alpha, int N) {
  const double s = r_n + std::abs(x);
  return gamma_rn - N * s * s / (4.0 * t) - N * std::log(s) - 0.5 * N * std::log(t) -
         std::pow(gamma_rn, alpha) * t;
}

double t_star(double x, double r_n, double gamma_rn, double alpha, int N) {
  const double s = r_n + std::abs(x);
  const double ga = std::pow(gamma_rn, alpha);
  return N * s * s / (N + std::sqrt(double(N) * N + 4.0 * N * s * s * ga));
}

double nu_n(double x, double r_n, double gamma_rn, double alpha, int N) {
  const double b = B_n_value(t_star(x, r_n, gamma_rn, alpha, N), x, r_n, gamma_rn, alpha, N);
  return (gamma_rn - b) / (std::sqrt(double(N)) * r_n * std::pow(gamma_rn, 0.5 * alpha)) - 1.0;
}

Verdict threshold_verdict(const GrowthFunction& g, double alpha, int N) {
  if (!g.beta || !g.coeff) throw PreconditionError("growth function has no declared asymptotic (beta, K)");
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("threshold verdict needs alpha in (0, 2)");
  Verdict v;
  v.critical_exponent = 2.0 / (2.0 - alpha);
  v.dimension_constant = std::pow(double(N), 1.0 / (2.0 - alpha));
  v.growth_constant = growth_constant(alpha);
  const double beta = *g.beta, K = *g.coeff;
  const bool above = beta > v.critical_exponent * (1.0 + 1e-12);
  const bool equal = std::abs(beta - v.critical_exponent) <= 1e-12 * v.critical_exponent;
  v.dimension_threshold_exceeded = above || (equal && K > v.dimension_constant);
  v.growth_threshold_exceeded = above || (equal && K > v.growth_constant);
  return v;
}

Alpha2Result alpha2_B_n(double t, double x, double r_n, double gamma_rn, int N) {
  const double s = r_n + std::abs(x);
  auto B = [&](double tt) {
    return gamma_rn - tt * gamma_rn * gamma_rn - N * s * s / (4.0 * tt) - N * std::log(s) - 0.5 * N * std::log(tt);
  };
  Alpha2Result r;
  r.value = B(t);
  r.t_max = N * s * s / (N + std::sqrt(double(N) * N + 4.0 * N * s * s * gamma_rn * gamma_rn));
  r.at_max = B(r.t_max);
  r.leading = gamma_rn - r_n * gamma_rn * std::sqrt(double(N));
  r.nu = std::sqrt(double(N)) - (gamma_rn - r.at_max) / (r_n * gamma_rn);
  return r;
}

double I_n_quadrature(double t, double x, double r_n, const GrowthFunction& g, double omega_int, int N) {
  if (N != 1) throw DomainError("direct I_n quadrature supports N = 1 only");
  if (!(t > 0.0) || !(r_n > 0.0)) throw DomainError("I_n needs t > 0 and r_n > 0");
  const double cap = g.gamma(r_n);
  auto exponent = [&](double y) {
    const double gy = std::min(cap, g.gamma(std::abs(y)));
    return -(x - y) * (x - y) / (4.0 * t) + log_expm1(gy);
  };
  // Locate the peak on a sample grid to stabilise the exponentials.
  double peak = -kInf, where = 0.0;
  const int samples = 4000;
  for (int i = 0; i <= samples; ++i) {
    const double y = -r_n + 2.0 * r_n * i / samples;
    const double e = exponent(y);
    if (e > peak) {
      peak = e;
      where = y;
    }
  }
  if (peak == -kInf) return -kInf;
  auto f = [&](double y) { return std::exp(exponent(y) - peak); };
  std::vector<double> cuts{-r_n, r_n, 0.0, where};
  if (std::abs(x) < r_n) cuts.push_back(x);
  // The Gaussian factor is √t wide; nest cuts around the peak so no panel misses it.
  for (double w = std::sqrt(t); w < 2.0 * r_n; w *= 8.0) {
    for (double c : {where - w, where + w}) {
      if (std::abs(c) < r_n) cuts.push_back(c);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += integrate(f, cuts[i], cuts[i + 1], 1e-11).value;
  if (!(total > 0.0)) return -kInf;
  return peak + std::log(total) - omega_int - 0.5 * std::log(4.0 * std::numbers::pi * t);
}

ThresholdReport threshold_report(const GrowthFunction& g, double alpha, int N, const std::vector<double>& radii,
                                 double x) {
  ThresholdReport rep;
  rep.alpha = alpha;
  rep.dimension = N;
  rep.x = x;
  if (g.beta && g.coeff && alpha < 2.0) rep.verdict = threshold_verdict(g, alpha, N);
  for (double r : radii) {
    ThresholdRow row;
    row.r_n = r;
    row.gamma_rn = g.gamma(r);
    if (alpha == 2.0) {
      Alpha2Result a2 = alpha2_B_n(1.0, x, r, row.gamma_rn, N);
      row.t_n = a2.t_max;
      row.B_n = a2.at_max;
      row.nu = a2.nu;
    } else {
      row.t_n = t_star(x, r, row.gamma_rn, alpha, N);
      row.B_n = B_n_value(row.t_n, x, r, row.gamma_rn, alpha, N);
      row.nu = nu_n(x, r, row.gamma_rn, alpha, N);
    }
    const double omega = row.t_n <= 1.0 ? omega_integral_bound(row.gamma_rn, alpha, row.t_n).bound
                                        : std::pow(row.gamma_rn, alpha) * row.t_n;
    row.log_J = J_n_lower_bound(row.t_n, x, r, log_expm1(row.gamma_rn), omega, N).log_bound;
    rep.rows.push_back(row);
  }
  return rep;
}

std::string ThresholdReport::to_json() const {
  nlohmann::ordered_json j;
  j["alpha"] = alpha;
  j["dimension"] = dimension;
  j["x"] = x;
  j["verdict"] = {{"dimension_threshold_exceeded", verdict.dimension_threshold_exceeded},
                  {"growth_threshold_exceeded", verdict.growth_threshold_exceeded},
                  {"critical_exponent", verdict.critical_exponent},
                  {"dimension_constant", verdict.dimension_constant},
                  {"growth_constant", verdict.growth_constant}};
  auto& arr = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    arr.push_back({{"r_n", r.r_n}, {"gamma_rn", r.gamma_rn}, {"t_n", r.t_n}, {"B_n", r.B_n}, {"log_J", r.log_J},
                   {"nu", r.nu}});
  }
  return j.dump(2);
}

std::string ThresholdReport::to_csv() const {
  std::ostringstream os;
  os << "r_n,gamma_rn,t_n,B_n,log_J,nu\n";
  for (const auto& r : rows) {
    os << fmt17(r.r_n) << ',' << fmt17(r.gamma_rn) << ',' << fmt17(r.t_n) << ',' << fmt17(r.B_n) << ','
       << fmt17(r.log_J) << ',' << fmt17(r.nu) << '\n';
  }
  return os.str();
}

}  // namespace radlab
