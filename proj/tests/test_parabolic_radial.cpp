#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "radlab/parabolic_radial.hpp"
#include "radlab/scalar_ode.hpp"
#include "radlab/stationary_radial.hpp"

using namespace radlab;

namespace {

const NonlinearitySpec& spec15() {
  static const NonlinearitySpec s = NonlinearitySpec::log_power(1.5);
  return s;
}

Boundary flat_trace(const NonlinearitySpec& spec, double a) {
  return Boundary::trace_w(
      [spec, a](double t) {
        if (t == 0.0) return std::log1p(a);
        const double y = solve_phi_log(spec, std::log(a), t);
        return y > 35 ? y + std::log1p(std::exp(-y)) : std::log1p(std::exp(y));
      },
      "flat trace");
}

}  // namespace

TEST_CASE("grid construction") {
  const RadialGrid g = RadialGrid::with_spacing(2.0, 0.05, 2);
  CHECK(g.size() == 41);
  CHECK(g.spacing() == doctest::Approx(0.05));
  CHECK(g.outer() == doctest::Approx(2.0));
  CHECK_THROWS_AS(RadialGrid::with_spacing(2.01, 0.05, 1), DomainError);
  CHECK_THROWS_AS(RadialGrid::uniform(1.0, 10, 1), DomainError);
}

TEST_CASE("time grid lands on every output") {
  TimeStepping ts;
  const std::vector<double> outputs{0.0, 0.001, 0.1, 0.25};
  const auto steps = geometric_time_grid(outputs, ts);
  CHECK(steps.front() == doctest::Approx(1e-6));
  for (double t : outputs) {
    if (t > 0) CHECK(std::find(steps.begin(), steps.end(), t) != steps.end());
  }
  for (std::size_t i = 1; i < steps.size(); ++i) {
    CHECK(steps[i] > steps[i - 1]);
    CHECK(steps[i] - steps[i - 1] <= 1.25 * ts.dt_max + 1e-15);
  }
}

TEST_CASE("zero data stay zero") {
  const RadialGrid g = RadialGrid::with_spacing(2.0, 0.05, 1);
  const auto f = evolve(spec15(), g, InitialData::raw(GrowthFunction::zero()), Boundary::constant_w(0.0),
                        {0.0, 0.1, 0.5});
  for (const auto& row : f.values) {
    for (double w : row) CHECK(w == 0.0);
  }
  CHECK(f.stats.violations == 0);
}

TEST_CASE("flat data follow the flat ODE, first order in the time step") {
  const double a = 5.0;
  const RadialGrid g = RadialGrid::with_spacing(2.0, 0.05, 1);
  const std::vector<double> times{0.0, 0.01, 0.05};
  const double exact = std::exp(solve_phi_log(spec15(), std::log(a), 0.05));
  std::vector<double> errors;
  for (double dt : {1e-4, 5e-5, 2.5e-5}) {
    TimeStepping ts;
    ts.dt_max = dt;
    const auto f = evolve(spec15(), g, InitialData::from_w(std::vector<double>(g.size(), std::log1p(a))),
                          flat_trace(spec15(), a), times, ts);
    double spread = 0.0;
    for (double w : f.values[2]) spread = std::max(spread, std::abs(w - f.values[2][0]));
    // the boundary carries the exact flat trace, the interior lags by O(dt)
    CHECK(spread <= 0.2 * dt);
    errors.push_back(std::abs(f.u(2, 0) / exact - 1.0));
  }
  CHECK(errors.back() <= 1e-5);
  const double order = std::log2(errors[0] / errors[1]);
  const double order2 = std::log2(errors[1] / errors[2]);
  CHECK(order == doctest::Approx(1.0).epsilon(0.2));
  CHECK(order2 == doctest::Approx(1.0).epsilon(0.2));

  TimeStepping fine;
  fine.dt_max = 2e-6;
  const auto f = evolve(spec15(), g, InitialData::from_w(std::vector<double>(g.size(), std::log1p(a))),
                        flat_trace(spec15(), a), {0.0, 0.01}, fine);
  CHECK(std::abs(f.u(1, 0) / std::exp(solve_phi_log(spec15(), std::log(a), 0.01)) - 1.0) <= 1e-6);
}

TEST_CASE("discrete stationary profile is a steady state and close to the shooting profile") {
  for (int N : {1, 3}) {
    const RadialGrid g = RadialGrid::with_spacing(4.0, 0.02, N);
    const auto wa = profile_on_grid(spec15(), 1.0, g);
    const auto f = evolve(spec15(), g, InitialData::from_w(wa), Boundary::constant_w(wa.back()), {0.0, 0.2, 1.0});
    for (std::size_t j = 0; j < wa.size(); ++j) CHECK(std::abs(f.values[2][j] - wa[j]) <= 1e-9);
    const auto shot = shoot_V(spec15(), 1.0, N, 4.0, g.radii);
    double dev = 0.0;
    for (std::size_t j = 0; j < wa.size(); ++j) dev = std::max(dev, std::abs(wa[j] - shot.w_values[j]));
    CHECK(dev <= 0.05 * g.spacing());
  }
}

TEST_CASE("shooting profile drifts by O(h²) under the scheme") {
  std::vector<double> drift;
  for (double h : {0.04, 0.02}) {
    const RadialGrid g = RadialGrid::with_spacing(4.0, h, 3);
    const auto shot = shoot_V(spec15(), 1.0, 3, 4.0, g.radii);
    const auto f = evolve(spec15(), g, InitialData::from_w(shot.w_values), Boundary::constant_w(shot.w_values.back()),
                          {0.0, 1.0});
    double d = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) d = std::max(d, std::abs(f.values[1][j] - shot.w_values[j]));
    drift.push_back(d);
  }
  CHECK(std::log2(drift[0] / drift[1]) == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("comparison of ordered runs") {
  const RadialGrid g = RadialGrid::with_spacing(3.0, 0.05, 2);
  const std::vector<double> times{0.0, 0.05, 0.3};
  std::vector<double> w1(g.size()), w2(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    w1[j] = 2.0 + std::sin(3.0 * g.radii[j]);
    w2[j] = std::log1p(std::expm1(w1[j]) + 1.0);
  }
  const auto f1 = evolve(spec15(), g, InitialData::from_w(w1), Boundary::constant_w(w1.back()), times);
  const auto f2 = evolve(spec15(), g, InitialData::from_w(w2), Boundary::constant_w(w2.back()), times);
  CHECK(check_comparison(f1, f1) == 0.0);
  CHECK(check_comparison(f1, f2) < 0.0);

  const RadialGrid other = RadialGrid::with_spacing(3.0, 0.1, 2);
  const auto f3 = evolve(spec15(), other, InitialData::raw(GrowthFunction::zero()), Boundary::constant_w(0.0), times);
  CHECK_THROWS_AS(check_comparison(f1, f3), GridMismatch);
}

TEST_CASE("comparison property on randomized ordered pairs") {
  std::mt19937_64 rng(20241);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const RadialGrid g = RadialGrid::with_spacing(2.0, 0.05, 1);
  const std::vector<double> times{0.0, 0.05, 0.2};
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<double> lo(g.size()), hi(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) {
      lo[j] = 6.0 * U(rng);
      hi[j] = lo[j] + 2.0 * U(rng);
    }
    const double blo = 3.0 * U(rng);
    const auto f1 = evolve(spec15(), g, InitialData::from_w(lo), Boundary::constant_w(blo), times);
    const auto f2 = evolve(spec15(), g, InitialData::from_w(hi), Boundary::constant_w(blo + U(rng)), times);
    CHECK(check_comparison(f1, f2) <= 1e-9);
    CHECK(f1.stats.violations == 0);
  }
}

TEST_CASE("truncated-data scheme: increasing in n and below the flat bound") {
  SchemeOptions opt;
  opt.spacing = 0.05;
  opt.time.dt_max = 5e-3;
  const std::vector<double> times{0.0, 0.25, 0.5};
  const auto seq = run_truncated_scheme(spec15(), GrowthFunction::power_law(2.0, 4.0), {2.0, 3.0, 4.0}, 6.0, times, opt);
  CHECK(seq.monotone_margin <= 1e-12);
  CHECK(seq.excess_over_flat <= seq.discretization_tol);
  CHECK(seq.domain_influence <= 1e-6);
  for (std::size_t i = 0; i + 1 < seq.fields.size(); ++i) {
    CHECK(check_comparison(seq.fields[i], seq.fields[i + 1]) <= 1e-12);
  }
  const auto zero = run_truncated_scheme(spec15(), GrowthFunction::zero(), {2.0, 3.0}, 6.0, times, opt);
  for (const auto& f : zero.fields) {
    for (const auto& row : f.values) {
      for (double w : row) CHECK(w == 0.0);
    }
  }
  CHECK_THROWS_AS(run_truncated_scheme(spec15(), GrowthFunction::zero(), {}, 6.0, times, opt), DomainError);
  CHECK_THROWS_AS(run_truncated_scheme(spec15(), GrowthFunction::zero(), {7.0}, 6.0, times, opt), DomainError);
}

TEST_CASE("capped-data scheme: decreasing in n, below V_a, subsolution bound") {
  SchemeOptions opt;
  opt.spacing = 0.05;
  opt.time.dt_max = 5e-3;
  const std::vector<double> times{0.0, 0.25, 0.5};
  const auto g = GrowthFunction::power_law(2.0 * 0.00390625, 4.0);
  const auto s2 = run_capped_scheme(spec15(), g, 2.0, {3.0, 4.0, 5.0}, times, opt);
  CHECK(s2.monotone_margin <= 1e-12);
  CHECK(s2.excess_over_profile <= 1e-12);
  CHECK(s2.subsolution_excess <= 1e-9);
  CHECK(s2.below_domination_radius);
  CHECK(s2.domination_radius > 5.0);
  const auto s4 = run_capped_scheme(spec15(), g, 4.0, {3.0, 4.0, 5.0}, times, opt);
  // a1 < a2 ⇒ u_{a1} ≤ u_{a2}
  CHECK(check_comparison(s2.limit(), s4.limit()) <= 1e-12);
  // w_{a,n} = V_a − u_{a,n} increases with n on the common nodes
  const auto& f0 = s2.fields[0];
  const auto& f1 = s2.fields[1];
  for (std::size_t j = 0; j < f0.grid.size(); ++j) {
    CHECK(f1.values[2][j] <= f0.values[2][j] + 1e-12);
  }
}

TEST_CASE("sandwich scheme") {
  SchemeOptions opt;
  opt.spacing = 0.05;
  opt.time.dt_max = 5e-3;
  const std::vector<double> times{0.0, 0.5};
  const auto prof = shoot_V(spec15(), 1.5, 1, 10.0, 1000);
  const auto res = run_sandwich_scheme(spec15(), GrowthFunction::from_profile(prof), 1.0, 2.0, {3.0, 4.0}, times, opt);
  CHECK(res.lower.monotone_margin <= 1e-12);
  CHECK(res.upper.monotone_margin <= 1e-12);
  CHECK(res.lower_sandwich_margin >= -1e-9);
  CHECK(res.upper_sandwich_margin >= -1e-9);
  CHECK_THROWS_AS(run_sandwich_scheme(spec15(), GrowthFunction::from_profile(prof), 2.0, 3.0, {3.0}, times, opt),
                  PreconditionError);

  // g = V_c on the grid: the lower limit is the steady state
  const RadialGrid grid = RadialGrid::with_spacing(4.0, opt.spacing, 1);
  const auto wc = profile_on_grid(spec15(), 1.0, grid);
  const auto lower = evolve(spec15(), grid, InitialData::from_w(wc), Boundary::constant_w(wc.back()), times);
  for (std::size_t j = 0; j < wc.size(); ++j) CHECK(std::abs(lower.values[1][j] - wc[j]) <= 1e-9);
}

TEST_CASE("per-n runs are deterministic across thread counts") {
  SchemeOptions opt;
  opt.spacing = 0.05;
  opt.time.dt_max = 1e-2;
  opt.domain_check = false;
  const std::vector<double> times{0.0, 0.2};
  const auto g = GrowthFunction::power_law(1.0, 2.0);
  const auto serial = run_truncated_scheme(spec15(), g, {1.0, 2.0, 3.0}, 4.0, times, opt);
  opt.threads = 3;
  const auto threaded = run_truncated_scheme(spec15(), g, {1.0, 2.0, 3.0}, 4.0, times, opt);
  for (std::size_t i = 0; i < serial.fields.size(); ++i) CHECK(serial.fields[i].values == threaded.fields[i].values);
  CHECK(serial.to_json() == threaded.to_json());
}

TEST_CASE("evolve rejects malformed input") {
  const RadialGrid g = RadialGrid::with_spacing(2.0, 0.05, 1);
  CHECK_THROWS_AS(evolve(spec15(), g, InitialData::raw(GrowthFunction::zero()), Boundary::constant_w(0.0), {0.1, 0.2}),
                  DomainError);
  CHECK_THROWS_AS(evolve(spec15(), g, InitialData::from_w({1.0, 2.0}), Boundary::constant_w(0.0), {0.0, 0.2}),
                  GridMismatch);
  CHECK_THROWS_AS(Boundary::constant_w(-1.0), DomainError);
}
