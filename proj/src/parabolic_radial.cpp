#include "radlab/parabolic_radial.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "json.hpp"

#include "radlab/scalar_ode.hpp"
#include "radlab/stationary_radial.hpp"
#include "radlab/threshold_analysis.hpp"

namespace radlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ln(1 + e^y)
double softplus(double y) { return y > 35.0 ? y + std::log1p(std::exp(-y)) : std::log1p(std::exp(y)); }

// (1 − e^{−W}) k(W) and its derivative in W.
struct Source {
  double value, slope;
};

Source absorption(const NonlinearitySpec& spec, double w) {
  if (w <= 0.0) return {0.0, spec.k(0.0)};
  const double em = -std::expm1(-w);
  const double k = spec.k(w);
  return {em * k, (1.0 - em) * k + em * spec.dk(w)};
}

// Coefficients of (Δu)/(1+u) at node j: up·expm1(W_{j+1} − W_j) + down·expm1(W_{j−1} − W_j).
// The first-order term is upwinded where central differencing would give a
// negative weight.
struct Stencil {
  std::vector<double> up, down;
};

Stencil stencil(const RadialGrid& grid) {
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  const double ih2 = 1.0 / (h * h);
  const int N = grid.dimension;
  Stencil s{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  s.up[0] = 2.0 * N * ih2;
  for (std::size_t j = 1; j < n; ++j) {
    const double c = (N - 1) / (2.0 * grid.radii[j] * h);
    s.up[j] = ih2 + c;
    s.down[j] = ih2 - c;
    if (s.down[j] < 0.0) {
      s.up[j] = ih2 + 2.0 * c;
      s.down[j] = ih2;
    }
  }
  return s;
}

class ImplicitStep {
 public:
  ImplicitStep(const NonlinearitySpec& spec, const RadialGrid& grid, const Tolerances& tol)
      : spec_(spec), tol_(tol) {
    const std::size_t n = grid.size();
    Stencil st = stencil(grid);
    up_ = std::move(st.up);
    down_ = std::move(st.down);
    res_.resize(n);
    diag_.resize(n);
    lower_.resize(n);
    upper_.resize(n);
    delta_.resize(n);
    trial_.resize(n);
  }

  // Advances `w` (holding the old values) by dt with the new boundary value.
  void advance(std::vector<double>& w, double dt, double w_boundary, std::size_t step_index, EvolutionStats& st) {
    const std::size_t n = w.size();
    const std::vector<double> old = w;
    w[n - 1] = w_boundary;
    double rnorm = residual(w, old, dt, res_);
    std::size_t it = 0;
    bool converged = std::isfinite(rnorm) && newton(w, old, dt, w_boundary, rnorm, it, st);
    if (!converged) {
      // Steep fronts: start from a nodewise relaxation instead.
      w = old;
      w[n - 1] = w_boundary;
      predictor(w, old, dt);
      rnorm = residual(w, old, dt, res_);
      std::size_t more = 0;
      converged = std::isfinite(rnorm) && newton(w, old, dt, w_boundary, rnorm, more, st);
      it += more;
    }
    if (!converged) throw NewtonDivergence(step_index, rnorm);
    st.newton_iterations += it;
    st.max_newton_iterations = std::max(st.max_newton_iterations, it);
    for (std::size_t j = 0; j + 1 < n; ++j) {
      if (w[j] < -1e-10) {
        ++st.violations;
        st.worst_negative = std::min(st.worst_negative, w[j]);
      }
      if (w[j] < 0.0) w[j] = 0.0;
    }
  }

 private:
  bool newton(std::vector<double>& w, const std::vector<double>& old, double dt, double w_boundary, double& rnorm,
              std::size_t& it, EvolutionStats& st) {
    const std::size_t n = w.size();
    for (it = 0; it < std::size_t(tol_.newton_max_iter);) {
      jacobian(w, dt);
      for (std::size_t j = 0; j + 1 < n; ++j) delta_[j] = -res_[j];
      thomas(n - 1);
      double dnorm = 0.0;
      for (std::size_t j = 0; j + 1 < n; ++j) dnorm = std::max(dnorm, std::abs(delta_[j]));
      if (!std::isfinite(dnorm)) return false;
      double lambda = 1.0;
      bool accepted = false;
      for (int k = 0; k <= tol_.damping_halvings; ++k) {
        for (std::size_t j = 0; j + 1 < n; ++j) trial_[j] = w[j] + lambda * delta_[j];
        trial_[n - 1] = w_boundary;
        const double tn = residual(trial_, old, dt, scratch_);
        if (std::isfinite(tn) && (tn <= rnorm * (1.0 - 1e-4 * lambda) || dnorm * lambda <= tol_.newton)) {
          accepted = true;
          rnorm = tn;
          res_.swap(scratch_);
          break;
        }
        lambda *= 0.5;
      }
      if (!accepted) {
        // No decrease at rounding level: take the full step and let the
        // iteration budget decide.
        for (std::size_t j = 0; j + 1 < n; ++j) trial_[j] = w[j] + delta_[j];
        trial_[n - 1] = w_boundary;
        rnorm = residual(trial_, old, dt, res_);
        if (!std::isfinite(rnorm)) return false;
        lambda = 1.0;
      }
      if (lambda < 1.0) ++st.damped_steps;
      w.swap(trial_);
      ++it;
      if (dnorm * lambda <= tol_.newton) return true;
    }
    return false;
  }

  // One forward and one backward nonlinear Gauss–Seidel sweep. Each node
  // solves its own row with the neighbours frozen; the coupling enters as
  // e^{L − W} with L = ln(a e^{W+} + b e^{W−}), so jumps of thousands of
  // e-folds between nodes stay finite.
  void predictor(std::vector<double>& w, const std::vector<double>& old, double dt) {
    const std::size_t n = w.size();
    auto relax = [&](std::size_t j) {
      double L = std::log(up_[j]) + w[j + 1];
      if (j > 0 && down_[j] > 0.0) L = log_add(L, std::log(down_[j]) + w[j - 1]);
      const double ab = up_[j] + (j > 0 ? down_[j] : 0.0);
      auto fd = [&](double x) {
        const Source s = absorption(spec_, x);
        const double c = std::exp(L - x);
        return std::pair<double, double>{(x - old[j]) / dt + ab + s.value - c, 1.0 / dt + s.slope + c};
      };
      const double lo = std::max(0.0, L - 700.0);
      if (fd(lo).first >= 0.0) {
        w[j] = lo;
        return;
      }
      double hi = std::max({old[j], L, lo + 1.0});
      while (fd(hi).first < 0.0) hi = 2.0 * hi + 1.0;
      w[j] = newton_bisect(fd, lo, hi, hi, 1e-12 * std::max(1.0, hi));
    };
    for (std::size_t j = 0; j + 1 < n; ++j) relax(j);
    for (std::size_t j = n - 1; j-- > 0;) relax(j);
  }

  double residual(const std::vector<double>& w, const std::vector<double>& old, double dt, std::vector<double>& r) {
    const std::size_t n = w.size();
    r.resize(n);
    double norm = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      double v = (w[j] - old[j]) / dt - up_[j] * std::expm1(w[j + 1] - w[j]);
      if (j > 0) v -= down_[j] * std::expm1(w[j - 1] - w[j]);
      v += absorption(spec_, w[j]).value;
      r[j] = v;
      if (!std::isfinite(v)) return kInf;
      norm = std::max(norm, std::abs(v));
    }
    return norm;
  }

  void jacobian(const std::vector<double>& w, double dt) {
    const std::size_t n = w.size();
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const double ep = up_[j] * std::exp(w[j + 1] - w[j]);
      const double em = j > 0 ? down_[j] * std::exp(w[j - 1] - w[j]) : 0.0;
      diag_[j] = 1.0 / dt + ep + em + absorption(spec_, w[j]).slope;
      upper_[j] = j + 2 < n ? -ep : 0.0;  // last unknown couples to the Dirichlet node
      lower_[j] = -em;
    }
  }

  // Solves the tridiagonal system in place on delta_[0..m-1].
  void thomas(std::size_t m) {
    std::vector<double>& c = scratch_;
    c.assign(m, 0.0);
    double beta = diag_[0];
    delta_[0] /= beta;
    for (std::size_t j = 1; j < m; ++j) {
      c[j - 1] = upper_[j - 1] / beta;
      beta = diag_[j] - lower_[j] * c[j - 1];
      delta_[j] = (delta_[j] - lower_[j] * delta_[j - 1]) / beta;
    }
    for (std::size_t j = m - 1; j-- > 0;) delta_[j] -= c[j] * delta_[j + 1];
  }

  const NonlinearitySpec& spec_;
  const Tolerances& tol_;
  std::vector<double> up_, down_, res_, diag_, lower_, upper_, delta_, trial_, scratch_;
};

template <class F>
auto parallel_map(std::size_t count, unsigned threads, F fn) {
  using R = decltype(fn(std::size_t{0}));
  std::vector<R> out;
  out.reserve(count);
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) out.push_back(fn(i));
    return out;
  }
  // Run in waves of `threads` workers; results are collected in index order.
  for (std::size_t start = 0; start < count; start += threads) {
    std::vector<std::future<R>> wave;
    for (std::size_t i = start; i < std::min(count, start + threads); ++i) {
      wave.push_back(std::async(std::launch::async, fn, i));
    }
    for (auto& f : wave) out.push_back(f.get());
  }
  return out;
}

// max over common nodes and all times of (f1 − f2); grids share spacing.
double max_diff_common(const EvolutionField& f1, const EvolutionField& f2, double r_limit = kInf) {
  if (f1.times != f2.times) throw GridMismatch("fields have different time grids");
  if (std::abs(f1.grid.spacing() - f2.grid.spacing()) > 1e-12 * f1.grid.spacing()) {
    throw GridMismatch("fields have different spacings");
  }
  const std::size_t m = std::min(f1.grid.size(), f2.grid.size());
  double worst = -kInf;
  for (std::size_t i = 0; i < f1.times.size(); ++i) {
    for (std::size_t j = 0; j < m && f1.grid.radii[j] <= r_limit + 1e-12; ++j) {
      worst = std::max(worst, f1.values[i][j] - f2.values[i][j]);
    }
  }
  return worst;
}

double max_abs_diff_common(const EvolutionField& f1, const EvolutionField& f2, double r_limit) {
  return std::max(max_diff_common(f1, f2, r_limit), max_diff_common(f2, f1, r_limit));
}

std::vector<double> log_phi_infinity(const NonlinearitySpec& spec, const std::vector<double>& times,
                                     const Tolerances& tol) {
  std::vector<double> out;
  for (double t : times) out.push_back(t > 0.0 ? solve_phi_infinity_log(spec, t, tol) : kInf);
  return out;
}

void check_n_list(const std::vector<double>& n_list) {
  if (n_list.empty()) throw DomainError("n_list is empty");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (!(n_list[i] > 0.0) || (i > 0 && !(n_list[i] > n_list[i - 1]))) {
      throw DomainError("n_list must be positive and increasing");
    }
  }
}

}  // namespace

RadialGrid RadialGrid::uniform(double R_out, std::size_t intervals, int N) {
  if (intervals < 17) throw DomainError("radial grid needs at least 16 interior nodes");
  if (N < 1) throw DomainError("dimension must be at least 1");
  RadialGrid g;
  g.radii = uniform_radii(R_out, intervals);
  g.dimension = N;
  return g;
}

RadialGrid RadialGrid::with_spacing(double R_out, double spacing, int N) {
  if (!(spacing > 0.0)) throw DomainError("grid spacing must be positive");
  const double q = R_out / spacing;
  const double rounded = std::round(q);
  if (std::abs(q - rounded) > 1e-9 * std::max(1.0, q)) {
    throw DomainError("outer radius " + std::to_string(R_out) + " is not a multiple of the spacing");
  }
  RadialGrid g = uniform(R_out, std::size_t(rounded), N);
  for (std::size_t j = 0; j < g.radii.size(); ++j) g.radii[j] = spacing * double(j);
  return g;
}

InitialData InitialData::truncated(GrowthFunction g, double n) {
  InitialData d;
  d.kind = InitialKind::Truncated;
  d.g = std::move(g);
  d.n = n;
  return d;
}

InitialData InitialData::capped(GrowthFunction g, double a) {
  InitialData d;
  d.kind = InitialKind::Capped;
  d.g = std::move(g);
  d.a = a;
  return d;
}

InitialData InitialData::raw(GrowthFunction g) {
  InitialData d;
  d.kind = InitialKind::Raw;
  d.g = std::move(g);
  return d;
}

InitialData InitialData::from_w(std::vector<double> w) {
  InitialData d;
  d.kind = InitialKind::Values;
  d.values = std::move(w);
  return d;
}

std::vector<double> InitialData::sample(const NonlinearitySpec& spec, const RadialGrid& grid,
                                        const Tolerances& tol) const {
  std::vector<double> w(grid.size());
  switch (kind) {
    case InitialKind::Values:
      if (values.size() != grid.size()) throw GridMismatch("initial values do not match the grid");
      w = values;
      break;
    case InitialKind::Raw:
      for (std::size_t j = 0; j < w.size(); ++j) w[j] = g.gamma(grid.radii[j]);
      break;
    case InitialKind::Truncated:
      for (std::size_t j = 0; j < w.size(); ++j) w[j] = grid.radii[j] <= n + 1e-12 ? g.gamma(grid.radii[j]) : 0.0;
      break;
    case InitialKind::Capped: {
      const auto wa = profile_on_grid(spec, a, grid, tol);
      for (std::size_t j = 0; j < w.size(); ++j) w[j] = std::min(wa[j], g.gamma(grid.radii[j]));
      break;
    }
  }
  for (double v : w) {
    if (!(v >= 0.0) || std::isnan(v)) throw DomainError("initial data must be nonnegative");
  }
  return w;
}

Boundary Boundary::constant_w(double w) {
  if (!(w >= 0.0)) throw DomainError("boundary value must be nonnegative");
  Boundary b;
  b.constant = w;
  b.description = "constant W=" + std::to_string(w);
  return b;
}

Boundary Boundary::constant_u(double u) { return constant_w(std::log1p(u)); }

Boundary Boundary::trace_w(std::function<double(double)> w_of_t, std::string description) {
  Boundary b;
  b.is_constant = false;
  b.trace = std::move(w_of_t);
  b.description = std::move(description);
  return b;
}

std::vector<double> geometric_time_grid(const std::vector<double>& outputs, const TimeStepping& ts) {
  if (!(ts.dt_first > 0.0) || !(ts.ratio >= 1.0) || !(ts.dt_max >= ts.dt_first)) {
    throw DomainError("invalid time stepping parameters");
  }
  std::vector<double> steps;
  double t = 0.0, dt = ts.dt_first;
  for (double target : outputs) {
    if (target <= t) continue;
    while (t < target) {
      double next = t + dt;
      if (next >= target || target - next < 0.25 * dt) next = target;
      steps.push_back(next);
      t = next;
      dt = std::min(dt * ts.ratio, ts.dt_max);
    }
  }
  return steps;
}

double EvolutionField::u(std::size_t i, std::size_t j) const {
  const double w = values.at(i).at(j);
  return w > std::log(1e300) ? 1e300 : std::expm1(w);
}

std::size_t EvolutionField::time_index(double t) const {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (std::abs(times[i] - t) <= 1e-12 * std::max(1.0, t)) return i;
  }
  throw DomainError("time " + std::to_string(t) + " is not an output time");
}

EvolutionField evolve(const NonlinearitySpec& spec, const RadialGrid& grid, const InitialData& init,
                      const Boundary& boundary, const std::vector<double>& times, const TimeStepping& ts,
                      const Tolerances& tol) {
  if (times.empty() || times.front() != 0.0) throw DomainError("output times must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw DomainError("output times must increase");
  }
  EvolutionField f;
  f.times = times;
  f.grid = grid;
  f.boundary = boundary;
  std::vector<double> w = init.sample(spec, grid, tol);
  w.back() = boundary.at(0.0);
  f.values.push_back(w);

  ImplicitStep stepper(spec, grid, tol);
  const auto steps = geometric_time_grid(times, ts);
  double t = 0.0;
  std::size_t next_out = 1;
  for (std::size_t s = 0; s < steps.size(); ++s) {
    const double tn = steps[s];
    stepper.advance(w, tn - t, boundary.at(tn), s, f.stats);
    ++f.stats.steps;
    t = tn;
    if (next_out < times.size() && tn == times[next_out]) {
      f.values.push_back(w);
      ++next_out;
    }
  }
  return f;
}

double check_comparison(const EvolutionField& f1, const EvolutionField& f2) {
  if (f1.grid.radii != f2.grid.radii || f1.grid.dimension != f2.grid.dimension) {
    throw GridMismatch("fields live on different grids");
  }
  if (f1.times != f2.times) throw GridMismatch("fields have different time grids");
  return max_diff_common(f1, f2);
}

std::vector<double> profile_on_grid(const NonlinearitySpec& spec, double a, const RadialGrid& grid,
                                    const Tolerances&) {
  if (!(a >= 0.0)) throw DomainError("profile center value must be nonnegative");
  const Stencil st = stencil(grid);
  std::vector<double> w(grid.size());
  w[0] = std::log1p(a);
  // march the stationary rows outward: row j fixes W_{j+1}
  for (std::size_t j = 0; j + 1 < w.size(); ++j) {
    double rhs = absorption(spec, w[j]).value;
    if (j > 0) rhs -= st.down[j] * std::expm1(w[j - 1] - w[j]);
    w[j + 1] = w[j] + std::log1p(rhs / st.up[j]);
    if (!std::isfinite(w[j + 1])) {
      throw OverflowError("discrete stationary profile overflows", grid.radii[j + 1]);
    }
  }
  return w;
}

std::string SchemeSequence::to_json() const {
  nlohmann::ordered_json j;
  j["scheme"] = scheme_tag;
  j["n_list"] = n_list;
  j["discretization_tol"] = discretization_tol;
  j["monotone_margin"] = monotone_margin;
  j["cauchy_differences"] = cauchy_differences;
  j["domain_influence"] = domain_influence;
  j["excess_over_flat"] = excess_over_flat;
  j["excess_over_profile"] = excess_over_profile;
  j["subsolution_excess"] = subsolution_excess;
  j["domination_radius"] = domination_radius;
  j["below_domination_radius"] = below_domination_radius;
  auto& runs = j["runs"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const auto& s = fields[i].stats;
    runs.push_back({{"n", n_list[i]},
                    {"outer_radius", fields[i].grid.outer()},
                    {"steps", s.steps},
                    {"newton_iterations", s.newton_iterations},
                    {"max_newton_iterations", s.max_newton_iterations},
                    {"damped_steps", s.damped_steps},
                    {"violations", s.violations}});
  }
  return j.dump(2);
}

SchemeSequence run_truncated_scheme(const NonlinearitySpec& spec, const GrowthFunction& g, const std::vector<double>& n_list,
                             double R_out, const std::vector<double>& times, const SchemeOptions& opt) {
  check_n_list(n_list);
  if (!(n_list.back() < R_out)) throw DomainError("truncation radii must stay below the outer radius");
  const RadialGrid grid = RadialGrid::with_spacing(R_out, opt.spacing, opt.dimension);
  SchemeSequence seq;
  seq.scheme_tag = "truncated-data";
  seq.n_list = n_list;
  seq.discretization_tol = opt.spacing * opt.spacing;
  const auto log_flat = log_phi_infinity(spec, times, opt.tol);
  seq.fields = parallel_map(n_list.size(), opt.threads, [&](std::size_t i) {
    EvolutionField f = evolve(spec, grid, InitialData::truncated(g, n_list[i]), Boundary::constant_w(0.0), times,
                              opt.time, opt.tol);
    f.scheme_tag = seq.scheme_tag;
    return f;
  });

  // u_n increases with n
  seq.monotone_margin = 0.0;
  for (std::size_t i = 0; i + 1 < seq.fields.size(); ++i) {
    seq.monotone_margin = std::max(seq.monotone_margin, check_comparison(seq.fields[i], seq.fields[i + 1]));
    seq.cauchy_differences.push_back(
        max_abs_diff_common(seq.fields[i + 1], seq.fields[i], opt.monitor_radius));
  }
  if (seq.monotone_margin > 10.0 * seq.discretization_tol) {
    throw MonotonicityViolation("truncated-data sequence is not increasing in n", seq.monotone_margin);
  }

  seq.excess_over_flat = -kInf;
  for (const auto& f : seq.fields) {
    for (std::size_t i = 1; i < times.size(); ++i) {
      const double cap = softplus(log_flat[i]);
      for (double w : f.values[i]) seq.excess_over_flat = std::max(seq.excess_over_flat, w - cap);
    }
  }

  if (opt.domain_check) {
    const double h = opt.spacing;
    const double R_big = h * std::ceil(1.5 * R_out / h - 1e-9);
    const RadialGrid big = RadialGrid::with_spacing(R_big, h, opt.dimension);
    const EvolutionField f = evolve(spec, big, InitialData::truncated(g, n_list.back()), Boundary::constant_w(0.0),
                                    times, opt.time, opt.tol);
    seq.domain_influence = max_abs_diff_common(f, seq.limit(), opt.monitor_radius);
  }
  return seq;
}

SchemeSequence run_capped_scheme(const NonlinearitySpec& spec, const GrowthFunction& g, double a,
                             const std::vector<double>& n_list, const std::vector<double>& times,
                             const SchemeOptions& opt) {
  check_n_list(n_list);
  if (!(a > 0.0)) throw DomainError("profile center value must be positive");
  SchemeSequence seq;
  seq.scheme_tag = "capped-data";
  seq.n_list = n_list;
  seq.discretization_tol = opt.spacing * opt.spacing;

  const int N = opt.dimension;
  const CrossingResult cross = compute_r_n(g, spec, a, N, opt.domination_search, 2000, opt.tol);
  seq.domination_radius = cross.radius;
  seq.below_domination_radius = n_list.front() < cross.radius;

  const auto log_flat = log_phi_infinity(spec, times, opt.tol);
  std::vector<std::vector<double>> profiles(n_list.size());
  seq.fields = parallel_map(n_list.size(), opt.threads, [&](std::size_t i) {
    const RadialGrid grid = RadialGrid::with_spacing(n_list[i], opt.spacing, N);
    const auto wa = profile_on_grid(spec, a, grid, opt.tol);
    std::vector<double> w0(wa.size());
    for (std::size_t j = 0; j < w0.size(); ++j) w0[j] = std::min(wa[j], g.gamma(grid.radii[j]));
    EvolutionField f = evolve(spec, grid, InitialData::from_w(w0), Boundary::constant_w(wa.back()), times, opt.time,
                              opt.tol);
    f.scheme_tag = seq.scheme_tag;
    profiles[i] = wa;
    return f;
  });

  // u_n decreases with n on the common nodes
  seq.monotone_margin = 0.0;
  for (std::size_t i = 0; i + 1 < seq.fields.size(); ++i) {
    seq.monotone_margin = std::max(seq.monotone_margin, max_diff_common(seq.fields[i + 1], seq.fields[i]));
    seq.cauchy_differences.push_back(
        max_abs_diff_common(seq.fields[i + 1], seq.fields[i], opt.monitor_radius));
  }
  if (seq.monotone_margin > 10.0 * seq.discretization_tol) {
    throw MonotonicityViolation("capped-data sequence is not decreasing in n", seq.monotone_margin);
  }

  seq.excess_over_profile = -kInf;
  seq.subsolution_excess = -kInf;
  for (std::size_t k = 0; k < seq.fields.size(); ++k) {
    const auto& f = seq.fields[k];
    const auto& wa = profiles[k];
    for (std::size_t i = 0; i < times.size(); ++i) {
      for (std::size_t j = 0; j < wa.size(); ++j) {
        const double w = f.values[i][j];
        seq.excess_over_profile = std::max(seq.excess_over_profile, w - wa[j]);
        if (i == 0 || !(w < wa[j])) continue;
        // ln(V_a − u) = W_a + ln(1 − e^{W − W_a})
        const double gap = wa[j] + std::log(-std::expm1(w - wa[j]));
        seq.subsolution_excess = std::max(seq.subsolution_excess, gap - log_flat[i]);
      }
    }
  }
  return seq;
}

SandwichResult run_sandwich_scheme(const NonlinearitySpec& spec, const GrowthFunction& g, double c, double b,
                               const std::vector<double>& n_list, const std::vector<double>& times,
                               const SchemeOptions& opt) {
  check_n_list(n_list);
  if (!(c > 0.0) || !(b > c)) throw DomainError("sandwich needs 0 < c < b");
  const int N = opt.dimension;
  const RadialGrid widest = RadialGrid::with_spacing(n_list.back(), opt.spacing, N);
  const auto wc_all = profile_on_grid(spec, c, widest, opt.tol);
  const auto wb_all = profile_on_grid(spec, b, widest, opt.tol);
  for (std::size_t j = 0; j < widest.size(); ++j) {
    const double gam = g.gamma(widest.radii[j]);
    const double slack = 1e-9 * std::max(1.0, gam);
    if (wc_all[j] > gam + slack || gam > wb_all[j] + slack) {
      throw PreconditionError("growth is not between the two stationary profiles at r = " +
                              std::to_string(widest.radii[j]));
    }
  }

  auto sequence = [&](const std::vector<double>& wbound, const char* tag) {
    SchemeSequence seq;
    seq.scheme_tag = tag;
    seq.n_list = n_list;
    seq.discretization_tol = opt.spacing * opt.spacing;
    seq.fields = parallel_map(n_list.size(), opt.threads, [&](std::size_t i) {
      const RadialGrid grid = RadialGrid::with_spacing(n_list[i], opt.spacing, N);
      EvolutionField f = evolve(spec, grid, InitialData::raw(g), Boundary::constant_w(wbound[grid.size() - 1]), times,
                                opt.time, opt.tol);
      f.scheme_tag = tag;
      return f;
    });
    return seq;
  };

  SandwichResult out;
  out.lower = sequence(wc_all, "sandwich-lower");
  out.upper = sequence(wb_all, "sandwich-upper");
  for (std::size_t i = 0; i + 1 < n_list.size(); ++i) {
    out.lower.monotone_margin =
        std::max(out.lower.monotone_margin, max_diff_common(out.lower.fields[i], out.lower.fields[i + 1]));
    out.upper.monotone_margin =
        std::max(out.upper.monotone_margin, max_diff_common(out.upper.fields[i + 1], out.upper.fields[i]));
    out.lower.cauchy_differences.push_back(
        max_abs_diff_common(out.lower.fields[i + 1], out.lower.fields[i], opt.monitor_radius));
    out.upper.cauchy_differences.push_back(
        max_abs_diff_common(out.upper.fields[i + 1], out.upper.fields[i], opt.monitor_radius));
  }
  const double limit = 10.0 * opt.spacing * opt.spacing;
  if (out.lower.monotone_margin > limit) {
    throw MonotonicityViolation("lower sandwich sequence is not increasing in n", out.lower.monotone_margin);
  }
  if (out.upper.monotone_margin > limit) {
    throw MonotonicityViolation("upper sandwich sequence is not decreasing in n", out.upper.monotone_margin);
  }
  out.lower_sandwich_margin = kInf;
  out.upper_sandwich_margin = kInf;
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    for (std::size_t i = 0; i < times.size(); ++i) {
      const auto& lo = out.lower.fields[k].values[i];
      const auto& up = out.upper.fields[k].values[i];
      for (std::size_t j = 0; j < lo.size(); ++j) {
        out.lower_sandwich_margin = std::min(out.lower_sandwich_margin, lo[j] - wc_all[j]);
        out.upper_sandwich_margin = std::min(out.upper_sandwich_margin, wb_all[j] - up[j]);
      }
    }
  }
  return out;
}

}  // namespace radlab
