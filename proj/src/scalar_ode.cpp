#include "radlab/scalar_ode.hpp"

#include <cmath>
#include <limits>

namespace radlab {

namespace {

void check_time_grid(std::span<const double> times, bool allow_zero) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    if (!std::isfinite(t) || t < 0.0 || (!allow_zero && t == 0.0)) {
      throw DomainError("invalid time grid: entries must be finite and " +
                        std::string(allow_zero ? "nonnegative" : "positive"));
    }
    if (i > 0 && !(t > times[i - 1])) throw DomainError("invalid time grid: not strictly increasing");
  }
}

double root_step_tol(double rel, double y) {
  return std::max(rel, 8.0 * std::numeric_limits<double>::epsilon() * std::abs(y));
}

}  // namespace

double flat_travel_time(const NonlinearitySpec& spec, double log_lo, double log_hi, double rel_tol) {
  return integrate([&](double u) { return 1.0 / spec.h_at_log(u); }, log_lo, log_hi, rel_tol).value;
}

double flat_time_from_infinity(const NonlinearitySpec& spec, double log_v, double rel_tol) {
  return integrate_tail([&](double u) { return 1.0 / spec.h_at_log(u); }, log_v, rel_tol).value;
}

double solve_phi_log(const NonlinearitySpec& spec, double log_a, double t, const Tolerances& tol) {
  if (!std::isfinite(log_a)) throw DomainError("flat solve needs finite data");
  if (!(t >= 0.0)) throw DomainError("flat solve needs t >= 0");
  if (t == 0.0) return log_a;
  const double q = tol.quadrature_rel;
  auto fd = [&](double y) {
    return std::pair<double, double>{flat_travel_time(spec, y, log_a, q) - t, -1.0 / spec.h_at_log(y)};
  };
  const double slope0 = spec.h_at_log(log_a);
  double step = std::max(1.0, std::isfinite(slope0) ? 2.0 * t * slope0 : 1.0);
  step = std::min(step, 1e4);
  double lo = log_a - step;
  while (flat_travel_time(spec, lo, log_a, q) < t) {
    step *= 2.0;
    if (step > 1e6 + 4.0 * std::abs(log_a)) throw ToleranceError("flat solve could not bracket the solution", step);
    // Visit 0 before going negative: h underflows far below it.
    lo = (lo > 0.0 && log_a - step < 0.0) ? 0.0 : log_a - step;
  }
  const double guess = std::isfinite(slope0) ? std::max(lo, log_a - t * slope0) : 0.5 * (lo + log_a);
  return newton_bisect(fd, lo, log_a, guess, root_step_tol(0.01 * tol.flat_root_rel, log_a));
}

FlatTrajectory solve_phi(const NonlinearitySpec& spec, double a, std::span<const double> times,
                         const Tolerances& tol) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("flat data must be positive and finite");
  check_time_grid(times, true);
  FlatTrajectory out;
  out.initial_datum = a;
  out.description = "flat solution, data " + std::to_string(a) + ", " + spec.description();
  out.times.assign(times.begin(), times.end());
  const double log_a = std::log(a);
  for (double t : times) {
    const double y = solve_phi_log(spec, log_a, t, tol);
    out.log_values.push_back(y);
    out.values.push_back(t == 0.0 ? a : std::exp(y));
  }
  return out;
}

double solve_phi_infinity_log(const NonlinearitySpec& spec, double t, const Tolerances& tol) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("infinite-data flat solution needs t > 0");
  if (!osgood_holds(spec)) {
    throw PreconditionError("infinite-data flat solution requires the Osgood condition");
  }
  const double q = tol.quadrature_rel;
  auto G = [&](double y) { return flat_time_from_infinity(spec, y, q); };
  double lo, hi;
  if (G(0.0) > t) {
    lo = 0.0;
    hi = 1.0;
    // Squaring the candidate value keeps the bracket search logarithmic.
    while (G(hi) > t) {
      lo = hi;
      hi = 2.0 * hi + 1.0;
      if (hi > 1e200) throw OverflowError("infinite-data flat solution bracket", t);
    }
  } else {
    hi = 0.0;
    lo = -1.0;
    while (G(lo) < t) {
      hi = lo;
      lo = 2.0 * lo - 1.0;
      if (lo < -1e4) throw ToleranceError("infinite-data flat solution could not bracket", t);
    }
  }
  auto fd = [&](double y) { return std::pair<double, double>{G(y) - t, -1.0 / spec.h_at_log(y)}; };
  return newton_bisect(fd, lo, hi, 0.5 * (lo + hi), root_step_tol(0.01 * tol.flat_root_rel, hi));
}

double solve_phi_infinity(const NonlinearitySpec& spec, double t, const Tolerances& tol) {
  const double y = solve_phi_infinity_log(spec, t, tol);
  if (y > std::log(1e300)) throw OverflowError("infinite-data flat solution exceeds 1e300", t);
  return std::exp(y);
}

FlatTrajectory solve_phi_infinity_trajectory(const NonlinearitySpec& spec, std::span<const double> times,
                                             const Tolerances& tol) {
  check_time_grid(times, false);
  FlatTrajectory out;
  out.initial_datum = std::numeric_limits<double>::infinity();
  out.description = "infinite-data flat solution, " + spec.description();
  out.times.assign(times.begin(), times.end());
  for (double t : times) {
    const double y = solve_phi_infinity_log(spec, t, tol);
    out.log_values.push_back(y);
    out.values.push_back(std::exp(y));
  }
  return out;
}

double flat_absorption_integral(const NonlinearitySpec& spec, double log_a, double t, const Tolerances& tol) {
  if (!(t >= 0.0)) throw DomainError("absorption integral needs t >= 0");
  if (t == 0.0) return 0.0;
  auto f = [&](double s) { return spec.h_at_log(solve_phi_log(spec, log_a, s, tol)); };
  return integrate(f, 0.0, t, 1e-8).value;
}

}  // namespace radlab
