#include "radlab/stationary_radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace radlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLogMax = std::log(1e300);

struct Deriv {
  double dw, dp;
};

// Dormand–Prince 5(4) stepper for the W-form of the radial equation.
class RadialStepper {
 public:
  RadialStepper(const NonlinearitySpec& spec, int N, double rel_tol, double abs_scale)
      : spec_(spec), nm1_(N - 1), rtol_(rel_tol), atol_(rel_tol * std::max(abs_scale, 1e-300)) {}

  Deriv rhs(double r, double w, double p) const {
    const double source = w > 0.0 ? -std::expm1(-w) * spec_.k(w) : 0.0;
    return {p, source - p * p - nm1_ / r * p};
  }

  // Advances `s` to exactly r_end. Returns false if W crossed `w_stop`
  // (state left at the last accepted point).
  bool advance(RadialState& s, double r_end, double& h, double w_stop) {
    while (s.r < r_end) {
      if (h <= 0.0 || !std::isfinite(h)) h = 1e-3 * std::max(1.0, r_end);
      bool last = false;
      if (s.r + h >= r_end) {
        h = r_end - s.r;
        last = true;
      }
      if (h < 1e-14 * std::max(1.0, s.r)) throw OverflowError("radial step size collapsed (blow-up)", s.r);
      double w5, p5, err;
      step(s, h, w5, p5, err);
      ++steps;
      if (!std::isfinite(w5) || !std::isfinite(p5) || !std::isfinite(err)) {
        ++rejected;
        h *= 0.25;
        continue;
      }
      if (err <= 1.0) {
        s.r = last ? r_end : s.r + h;
        s.w = w5;
        s.p = p5;
        const double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(fac, 0.2, 5.0);
        if (s.w > w_stop) return false;
      } else {
        ++rejected;
        h *= std::clamp(0.9 * std::pow(err, -0.25), 0.1, 0.9);
      }
    }
    return true;
  }

  std::size_t steps = 0;
  std::size_t rejected = 0;

 private:
  void step(const RadialState& s, double h, double& w5, double& p5, double& err) const {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
    const double r = s.r, w = s.w, p = s.p;
    Deriv k1 = rhs(r, w, p);
    Deriv k2 = rhs(r + c2 * h, w + h * a21 * k1.dw, p + h * a21 * k1.dp);
    Deriv k3 = rhs(r + c3 * h, w + h * (a31 * k1.dw + a32 * k2.dw), p + h * (a31 * k1.dp + a32 * k2.dp));
    Deriv k4 = rhs(r + c4 * h, w + h * (a41 * k1.dw + a42 * k2.dw + a43 * k3.dw),
                   p + h * (a41 * k1.dp + a42 * k2.dp + a43 * k3.dp));
    Deriv k5 = rhs(r + c5 * h, w + h * (a51 * k1.dw + a52 * k2.dw + a53 * k3.dw + a54 * k4.dw),
                   p + h * (a51 * k1.dp + a52 * k2.dp + a53 * k3.dp + a54 * k4.dp));
    Deriv k6 = rhs(r + h, w + h * (a61 * k1.dw + a62 * k2.dw + a63 * k3.dw + a64 * k4.dw + a65 * k5.dw),
                   p + h * (a61 * k1.dp + a62 * k2.dp + a63 * k3.dp + a64 * k4.dp + a65 * k5.dp));
    w5 = w + h * (b1 * k1.dw + b3 * k3.dw + b4 * k4.dw + b5 * k5.dw + b6 * k6.dw);
    p5 = p + h * (b1 * k1.dp + b3 * k3.dp + b4 * k4.dp + b5 * k5.dp + b6 * k6.dp);
    Deriv k7 = rhs(r + h, w5, p5);
    const double ew = h * (e1 * k1.dw + e3 * k3.dw + e4 * k4.dw + e5 * k5.dw + e6 * k6.dw + e7 * k7.dw);
    const double ep = h * (e1 * k1.dp + e3 * k3.dp + e4 * k4.dp + e5 * k5.dp + e6 * k6.dp + e7 * k7.dp);
    const double sw = atol_ + rtol_ * std::max(std::abs(w), std::abs(w5));
    const double sp = atol_ + rtol_ * std::max(std::abs(p), std::abs(p5));
    err = std::max(std::abs(ew) / sw, std::abs(ep) / sp);
  }

  const NonlinearitySpec& spec_;
  double nm1_;
  double rtol_;
  double atol_;
};

void check_grid(std::span<const double> grid) {
  if (grid.size() < 2) throw DomainError("radial grid needs at least two points");
  if (grid[0] != 0.0) throw DomainError("radial grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1]) || !std::isfinite(grid[i])) throw DomainError("radial grid must increase");
  }
}

}  // namespace

double RadialProfile::v_clipped(std::size_t j) const {
  const double w = w_values.at(j);
  return w > kLogMax ? 1e300 : std::expm1(w);
}

double RadialProfile::w_at(double r) const {
  if (radii.empty() || r < radii.front() || r > radii.back()) throw DomainError("radius outside the profile grid");
  auto it = std::upper_bound(radii.begin(), radii.end(), r);
  std::size_t j = it == radii.end() ? radii.size() - 1 : std::size_t(it - radii.begin());
  if (j == 0) j = 1;
  const std::size_t i = j - 1;
  const double h = radii[j] - radii[i];
  const double s = (r - radii[i]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  return h00 * w_values[i] + h10 * h * dw_values[i] + h01 * w_values[j] + h11 * h * dw_values[j];
}

std::vector<double> uniform_radii(double r_max, std::size_t intervals) {
  if (!(r_max > 0.0) || intervals == 0) throw DomainError("uniform radial grid needs r_max > 0 and intervals > 0");
  std::vector<double> r(intervals + 1);
  for (std::size_t j = 0; j <= intervals; ++j) r[j] = r_max * double(j) / double(intervals);
  r.back() = r_max;
  return r;
}

ShootResult integrate_radial(const NonlinearitySpec& spec, double w0, int N, std::span<const double> grid,
                             const ShootOptions& opt) {
  if (N < 1) throw DomainError("dimension must be at least 1");
  if (!(w0 >= 0.0) || !std::isfinite(w0)) throw DomainError("center value must be nonnegative");
  check_grid(grid);
  ShootResult out;
  out.states.reserve(grid.size());
  const double r_max = grid.back();
  const double r0 = 1e-6 * std::max(1.0, r_max);
  const double f0 = w0 > 0.0 ? -std::expm1(-w0) * spec.k(w0) : 0.0;
  auto taylor = [&](double r) { return RadialState{r, w0 + f0 * r * r / (2.0 * N), f0 * r / N}; };

  RadialStepper stepper(spec, N, opt.rel_tol, w0);
  RadialState s = taylor(r0);
  double h = 0.0;
  for (double r : grid) {
    if (r <= r0) {
      out.states.push_back(taylor(r));
      continue;
    }
    const bool ok = stepper.advance(s, r, h, opt.w_stop);
    if (!ok) {
      out.stopped = true;
      out.stop_radius = s.r;
      if (opt.throw_on_stop || opt.w_stop >= 1e300) throw OverflowError("W exceeded its stop value", s.r);
      break;
    }
    out.states.push_back(s);
  }
  out.steps = stepper.steps;
  out.rejected = stepper.rejected;
  return out;
}

RadialState advance_radial(const NonlinearitySpec& spec, int N, RadialState from, double r_end, double rel_tol) {
  if (!(from.r > 0.0)) throw DomainError("advance_radial needs a state away from the origin");
  RadialStepper stepper(spec, N, rel_tol, std::max(from.w, 1e-300));
  double h = 0.0;
  if (r_end <= from.r) return from;
  if (!stepper.advance(from, r_end, h, 1e300)) throw OverflowError("W exceeded 1e300", from.r);
  return from;
}

RadialProfile shoot_W(const NonlinearitySpec& spec, double w0, int N, std::span<const double> grid,
                      const Tolerances& tol) {
  ShootOptions opt;
  opt.rel_tol = tol.rk_rel;
  ShootResult res = integrate_radial(spec, w0, N, grid, opt);
  RadialProfile prof;
  prof.dimension = N;
  prof.center_value = w0 > kLogMax ? kInf : std::expm1(w0);
  prof.kind = ProfileKind::Shooting;
  prof.radii.assign(grid.begin(), grid.end());
  for (const auto& st : res.states) {
    prof.w_values.push_back(st.w);
    prof.dw_values.push_back(st.p);
  }
  return prof;
}

RadialProfile shoot_V(const NonlinearitySpec& spec, double a, int N, double r_max, std::span<const double> grid,
                      const Tolerances& tol) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("shooting data must be positive");
  if (!(r_max > 0.0)) throw DomainError("r_max must be positive");
  if (grid.empty() || std::abs(grid.back() - r_max) > 1e-12 * std::max(1.0, r_max)) {
    throw DomainError("radial grid must end at r_max");
  }
  RadialProfile p = shoot_W(spec, std::log1p(a), N, grid, tol);
  p.center_value = a;
  return p;
}

RadialProfile shoot_V(const NonlinearitySpec& spec, double a, int N, double r_max, std::size_t intervals,
                      const Tolerances& tol) {
  const auto grid = uniform_radii(r_max, intervals);
  return shoot_V(spec, a, N, r_max, grid, tol);
}

double keller_osserman_distance(const NonlinearitySpec& spec, double b, double log_v, double rel_tol) {
  if (!(b > 0.0)) throw DomainError("a-priori bound needs b > 0");
  auto f = [&](double u) { return std::exp(u - 0.5 * spec.log_H_at_log(u)); };
  return integrate(f, std::log(b), log_v, rel_tol).value;
}

double keller_osserman_tail(const NonlinearitySpec& spec, double log_v, double rel_tol) {
  if (!keller_osserman_holds(spec)) return kInf;
  auto f = [&](double u) { return std::exp(u - 0.5 * spec.log_H_at_log(u)); };
  return integrate_tail(f, log_v, rel_tol).value;
}

double apriori_bound_log(const NonlinearitySpec& spec, double b, double R, const Tolerances& tol) {
  if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("a-priori bound needs b > 0");
  if (!(R >= 0.0)) throw DomainError("a-priori bound needs R >= 0");
  const double lb = std::log(b);
  if (R == 0.0) return lb;
  const double target = std::sqrt(2.0) * R;
  if (keller_osserman_tail(spec, lb) <= target) return kInf;
  auto F = [&](double y) { return keller_osserman_distance(spec, b, y); };
  double d = 1.0, hi = lb + d;
  while (F(hi) < target) {
    d *= 2.0;
    hi = lb + d;
    if (d > 1e15) throw ToleranceError("a-priori bound bracket did not close", d);
  }
  const double lo = hi - d / (d > 1.0 ? 2.0 : 1.0);
  auto fd = [&](double y) {
    return std::pair<double, double>{F(y) - target, std::exp(y - 0.5 * spec.log_H_at_log(y))};
  };
  const double step_tol = std::max(0.01 * tol.apriori_rel, 8.0 * std::numeric_limits<double>::epsilon() * hi);
  return newton_bisect(fd, lo, hi, 0.5 * (lo + hi), step_tol);
}

double apriori_bound(const NonlinearitySpec& spec, double b, double R, const Tolerances& tol) {
  const double y = apriori_bound_log(spec, b, R, tol);
  return std::exp(y);
}

BoundaryBlowupResult boundary_blowup_profile(const NonlinearitySpec& spec, double m, int N,
                                             std::span<const double> k_list, std::size_t intervals,
                                             const Tolerances& tol) {
  if (!keller_osserman_holds(spec)) {
    throw PreconditionError("boundary blow-up profiles require the Keller-Osserman condition");
  }
  if (!(m > 0.0)) throw DomainError("ball radius must be positive");
  if (k_list.empty()) throw DomainError("boundary value list is empty");
  for (std::size_t i = 0; i < k_list.size(); ++i) {
    if (!(k_list[i] > 0.0) || (i > 0 && !(k_list[i] > k_list[i - 1]))) {
      throw DomainError("boundary values must be positive and increasing");
    }
  }
  const std::vector<double> ends{0.0, m};
  const auto grid = uniform_radii(m, intervals);
  BoundaryBlowupResult out;

  for (double k : k_list) {
    const double wk = std::log1p(k);
    // true when the shot from center ln(1+e^x) overshoots k at radius m
    auto overshoots = [&](double x) {
      ShootOptions opt;
      opt.rel_tol = tol.rk_rel;
      opt.w_stop = wk;
      opt.throw_on_stop = false;
      try {
        ShootResult r = integrate_radial(spec, std::log1p(std::exp(x)), N, ends, opt);
        return r.stopped || r.states.back().w >= wk;
      } catch (const OverflowError&) {
        return true;
      }
    };
    double hi = std::log(k);
    double lo = hi - 1.0;
    double d = 1.0;
    while (overshoots(lo)) {
      d *= 2.0;
      lo = hi - d;
      if (d > 2000.0) throw BracketError("boundary blow-up shooting bracket failed");
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (overshoots(mid)) hi = mid; else lo = mid;
    }
    RadialProfile prof = shoot_W(spec, std::log1p(std::exp(lo)), N, grid, tol);
    prof.center_value = std::exp(lo);
    prof.kind = ProfileKind::BoundaryBlowup;
    out.boundary_values.push_back(k);
    out.center_values.push_back(prof.center_value);
    out.profiles.push_back(std::move(prof));
  }
  for (std::size_t i = 1; i < out.profiles.size(); ++i) {
    const auto& a = out.profiles[i - 1];
    const auto& b = out.profiles[i];
    double dv = 0.0, dw = 0.0;
    for (std::size_t j = 0; j < grid.size() && grid[j] <= 0.9 * m + 1e-12; ++j) {
      dv = std::max(dv, std::abs(b.v_clipped(j) - a.v_clipped(j)));
      dw = std::max(dw, std::abs(b.w_values[j] - a.w_values[j]));
    }
    out.cauchy_differences.push_back(dv);
    out.cauchy_differences_w.push_back(dw);
  }
  out.profile = out.profiles.back();
  return out;
}

std::vector<LowerBoundCheck> check_boundary_lower_bound(const NonlinearitySpec& spec, const RadialProfile& profile,
                                                        double m, std::span<const double> radii, double slack) {
  std::vector<LowerBoundCheck> out;
  const int N = profile.dimension;
  for (double r : radii) {
    LowerBoundCheck c;
    c.r = r;
    const double w = profile.w_at(r);
    c.lhs = keller_osserman_tail(spec, log_expm1(w));
    c.rhs = std::sqrt(2.0 / N) * (m - r);
    c.holds = c.lhs >= c.rhs * (1.0 - slack);
    out.push_back(c);
  }
  return out;
}

double growth_constant(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("growth constant needs alpha in (0, 2)");
  const double e = 2.0 / (2.0 - alpha);
  return std::pow((2.0 - alpha) / 2.0, e);
}

FitReport verify_asymptotics(const RadialProfile& profile, double alpha) {
  if (!(alpha > 1.0 && alpha <= 2.0)) throw DomainError("asymptotic fit needs alpha in (1, 2]");
  if (profile.radii.size() < 4) throw InsufficientRange("profile too short for an asymptotic fit");
  const double r_max = profile.radii.back();
  if (profile.w_values.back() < 10.0) {
    throw InsufficientRange("W(r_max) = " + std::to_string(profile.w_values.back()) + " is below 10");
  }
  FitReport rep;
  rep.window_hi = r_max;
  rep.window_lo = 0.9 * r_max;
  std::vector<double> r, w;
  for (std::size_t j = 0; j < profile.radii.size(); ++j) {
    if (profile.radii[j] >= rep.window_lo - 1e-12 * r_max && profile.radii[j] > 0.0) {
      r.push_back(profile.radii[j]);
      w.push_back(profile.w_values[j]);
    }
  }
  rep.points = r.size();
  if (rep.points < 3) throw InsufficientRange("fewer than three points in the fit window");
  std::vector<double> lw(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) lw[i] = std::log(w[i]);

  if (alpha == 2.0) {
    rep.log_linear = true;
    rep.target_exponent = 1.0;
    rep.target_constant = 1.0;
    LineFit f = fit_line(r, lw);
    rep.exponent_hat = f.slope;
    rep.constant_hat = std::exp(f.intercept);
    rep.free_constant = rep.constant_hat;
    return rep;
  }
  const double e = 2.0 / (2.0 - alpha);
  rep.target_exponent = e;
  rep.target_constant = growth_constant(alpha);
  std::vector<double> lr(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) lr[i] = std::log(r[i]);
  LineFit f = fit_line(lr, lw);
  rep.exponent_hat = f.slope;
  rep.free_constant = std::exp(f.intercept);
  double mean = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) mean += lw[i] - e * lr[i];
  rep.constant_hat = std::exp(mean / double(r.size()));

  std::vector<double> root(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) root[i] = std::pow(w[i], 1.0 / e);
  LineFit g = fit_line(r, root);
  rep.linearized_constant = std::pow(g.slope, e);
  rep.shift = g.intercept / g.slope;
  return rep;
}

}  // namespace radlab
