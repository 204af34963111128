#include "doctest.h"

#include <cmath>
#include <vector>

#include "radlab/scalar_ode.hpp"

using namespace radlab;

namespace {

// Φ_a(t) for h(s) = s^{p−1}
double power_flat(double p, double a, double t) {
  return a / std::pow(1.0 + (p - 1.0) * std::pow(a, p - 1.0) * t, 1.0 / (p - 1.0));
}

}  // namespace

TEST_CASE("flat solution against the closed form of the power family") {
  CHECK(solve_phi(NonlinearitySpec::power(2.0), 1.0, std::vector<double>{1.0}).values[0] ==
        doctest::Approx(0.5).epsilon(1e-10));
  std::vector<double> times;
  for (int i = 0; i <= 20; ++i) times.push_back(0.05 * i);
  for (double p : {1.5, 2.0, 3.0}) {
    const auto spec = NonlinearitySpec::power(p);
    for (double a : {0.5, 1.0, 10.0}) {
      const FlatTrajectory tr = solve_phi(spec, a, times);
      for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(std::abs(tr.values[i] / power_flat(p, a, times[i]) - 1.0) <= 1e-8);
      }
    }
  }
}

TEST_CASE("initial condition and tiny data") {
  const auto spec = NonlinearitySpec::log_power(1.5);
  CHECK(solve_phi(spec, 10.0, std::vector<double>{0.0}).values[0] == 10.0);
  const double tiny = solve_phi(spec, 1e-12, std::vector<double>{1.0}).values[0];
  CHECK(tiny > 0.0);
  CHECK(tiny <= 1e-12);
}

TEST_CASE("infinite-data solution of the power family") {
  const auto spec = NonlinearitySpec::power(2.0);
  CHECK(solve_phi_infinity(spec, 0.25) == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(solve_phi_infinity(spec, 2.0) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(solve_phi_infinity(NonlinearitySpec::power(3.0), 0.5) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("infinite-data solution satisfies the tail identity") {
  const auto spec = NonlinearitySpec::log_power(1.5);
  for (double t : {0.1, 0.5, 1.0, 3.0}) {
    const double y = solve_phi_infinity_log(spec, t);
    // independent residual: ∫_y^∞ du/(softplus(u))^{1.5} with u = y + e^s − 1; the
    // integrand decays like e^{−s/2}, so s ≤ 100 leaves less than 1e-21
    const double G = integrate(
        [y](double s) {
          const double u = y + std::expm1(s);
          const double l = u > 35 ? u : std::log1p(std::exp(u));
          return std::pow(l, -1.5) * std::exp(s);
        },
        0.0, 100.0, 1e-12).value;
    CAPTURE(t);
    CHECK(std::abs(G - t) <= 1e-8 * t);
  }
  // frozen: ln Φ_∞ for α = 1.5
  CHECK(solve_phi_infinity_log(spec, 0.5) == doctest::Approx(16.0).epsilon(1e-3));
}

TEST_CASE("osgood failure is a precondition error") {
  CHECK_THROWS_AS(solve_phi_infinity(NonlinearitySpec::log_power(1.0), 1.0), PreconditionError);
  CHECK_THROWS_AS(solve_phi_infinity(NonlinearitySpec::log_power(1.5), 0.0), DomainError);
  CHECK_THROWS_AS(solve_phi_infinity(NonlinearitySpec::log_power(1.5), 1e-4), OverflowError);
}

TEST_CASE("monotone in the data and dominated by the infinite-data solution") {
  const auto spec = NonlinearitySpec::log_power(1.5);
  const std::vector<double> times{0.05, 0.2, 0.7, 1.0, 2.0};
  std::vector<double> prev(times.size(), 0.0);
  for (double a : {0.1, 1.0, 5.0, 100.0, 1e8}) {
    const FlatTrajectory tr = solve_phi(spec, a, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
      CHECK(tr.values[i] >= prev[i]);
      CHECK(tr.log_values[i] <= solve_phi_infinity_log(spec, times[i]) + 1e-10);
      if (i > 0) CHECK(tr.values[i] < tr.values[i - 1]);
    }
    prev = tr.values;
  }
}

TEST_CASE("semigroup property") {
  const auto spec = NonlinearitySpec::log_power(1.5);
  for (double a : {0.5, 3.0, 40.0}) {
    for (auto [t, s] : {std::pair{0.1, 0.3}, std::pair{0.5, 0.5}, std::pair{0.9, 0.05}}) {
      const double direct = solve_phi_log(spec, std::log(a), t + s);
      const double split = solve_phi_log(spec, solve_phi_log(spec, std::log(a), t), s);
      CHECK(std::abs(std::expm1(direct - split)) <= 1e-8);
    }
  }
}

TEST_CASE("data beyond the double range") {
  const auto spec = NonlinearitySpec::log_power(1.5);
  // e^{2592}: decays below the infinite-data solution yet above ln Φ_∞ − 3
  const double y = solve_phi_log(spec, 2592.0, 0.5);
  CHECK(std::isfinite(y));
  CHECK(y < solve_phi_infinity_log(spec, 0.5));
  CHECK(y > 10.0);
}

TEST_CASE("absorption integral of the power family") {
  // h(Φ_a) = a/(1+at) for p = 2, so ∫_0^t = ln(1+at)
  const auto spec = NonlinearitySpec::power(2.0);
  CHECK(flat_absorption_integral(spec, std::log(3.0), 0.7) == doctest::Approx(std::log1p(2.1)).epsilon(1e-8));
}

TEST_CASE("infinite-data trajectory is decreasing") {
  const auto tr = solve_phi_infinity_trajectory(NonlinearitySpec::log_power(1.5), std::vector<double>{0.1, 0.5, 1.0});
  CHECK(tr.log_values[0] > tr.log_values[1]);
  CHECK(tr.log_values[1] > tr.log_values[2]);
  CHECK(std::isinf(tr.initial_datum));
}
