#pragma once

// Shared numerical kernels: adaptive quadrature, tail integrals, bracketed
// root finding and small regression helpers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "radlab/errors.hpp"

namespace radlab {

/// Tolerances used by every operation; the defaults are the library contract.
struct Tolerances {
  double quadrature_rel = 1e-13;  // inner integrals of inversions
  double eval_H_rel = 1e-10;
  double flat_root_rel = 1e-10;   // solve_phi, solve_phi_infinity
  double rk_rel = 1e-9;
  double apriori_rel = 1e-8;
  double newton = 1e-10;
  double crossing_rel = 1e-8;     // compute_r_n
  int newton_max_iter = 50;
  int damping_halvings = 30;

  Tolerances scaled(double factor) const {
    Tolerances t = *this;
    t.quadrature_rel = std::max(quadrature_rel * factor, 1e-15);
    t.eval_H_rel *= factor;
    t.flat_root_rel *= factor;
    t.rk_rel *= factor;
    t.apriori_rel *= factor;
    t.newton *= factor;
    t.crossing_rel *= factor;
    return t;
  }
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
};

namespace detail {

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// One 21-point Gauss-Kronrod panel with the embedded 10-point Gauss estimate.
template <class F>
Panel gk21(const F& f, double a, double b) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 21>;
  using Gauss = boost::math::quadrature::gauss<double, 10>;
  const auto& x = Rule::abscissa();
  const auto& wk = Rule::weights();
  const auto& wg = Gauss::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double kronrod = f(mid) * wk[0];
  double gauss = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double fp = f(mid + half * x[i]);
    const double fm = f(mid - half * x[i]);
    kronrod += (fp + fm) * wk[i];
    if (i % 2 == 1) gauss += (fp + fm) * wg[i / 2];
  }
  kronrod *= half;
  gauss *= half;
  const double err =
      std::max(std::abs(kronrod - gauss), 10.0 * std::numeric_limits<double>::epsilon() * std::abs(kronrod));
  return {a, b, kronrod, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod quadrature of f over [a, b].
/// Throws QuadratureError when the error budget is not met within
/// `max_panels` subdivisions.
template <class F>
QuadratureResult integrate(const F& f, double a, double b, double rel_tol = 1e-13, double abs_tol = 0.0,
                           std::size_t max_panels = 4000) {
  if (a == b) return {};
  if (a > b) {
    QuadratureResult r = integrate(f, b, a, rel_tol, abs_tol, max_panels);
    r.value = -r.value;
    return r;
  }
  rel_tol = std::max(rel_tol, 50.0 * std::numeric_limits<double>::epsilon());
  std::priority_queue<detail::Panel> heap;
  detail::Panel first = detail::gk21(f, a, b);
  double total = first.value;
  double error = first.error;
  heap.push(first);
  std::size_t evals = 21;
  while (error > std::max(rel_tol * std::abs(total), abs_tol)) {
    if (heap.size() >= max_panels) {
      throw QuadratureError("adaptive quadrature did not converge", error);
    }
    detail::Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw QuadratureError("adaptive quadrature reached interval resolution limit", error);
    }
    detail::Panel left = detail::gk21(f, worst.a, mid);
    detail::Panel right = detail::gk21(f, mid, worst.b);
    evals += 42;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    if (!std::isfinite(total)) throw QuadratureError("non-finite integrand", error);
  }
  // Re-sum to shed the cancellation accumulated by incremental updates.
  double sum = 0.0, err = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {sum, err, evals};
}

struct TailResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t panels = 0;
  double ratio = 0.0;  // last panel-to-panel ratio used by the extrapolation
};

/// ∫_{u0}^{∞} f(u) du for integrands decaying at least like a power u^{-q},
/// q > 1. Uses geometric panels [s·2^j, s·2^{j+1}] and extrapolates the
/// remainder as a geometric series once the panel ratio has stabilised.
template <class F>
TailResult integrate_tail(const F& f, double u0, double rel_tol = 1e-13, std::size_t max_panels = 400) {
  TailResult out;
  double start = u0;
  if (u0 < 1.0) {
    QuadratureResult head = integrate(f, u0, 1.0, rel_tol * 0.5);
    out.value = head.value;
    out.error = head.error;
    start = 1.0;
  }
  double prev_panel = 0.0, prev_ratio = 0.0;
  double lo = start;
  for (std::size_t j = 0; j < max_panels; ++j) {
    const double hi = 2.0 * lo;
    QuadratureResult p = integrate(f, lo, hi, rel_tol * 0.5);
    out.value += p.value;
    out.error += p.error;
    ++out.panels;
    lo = hi;
    if (p.value <= std::abs(out.value) * 1e-3 * rel_tol || p.value == 0.0) return out;
    if (j > 0 && prev_panel > 0.0) {
      const double ratio = p.value / prev_panel;
      if (j > 2 && ratio < 1.0 && std::abs(ratio - prev_ratio) <= 1e-9 * ratio) {
        const double remainder = p.value * ratio / (1.0 - ratio);
        out.value += remainder;
        out.error += std::abs(remainder) * 1e-9 / (1.0 - ratio);
        out.ratio = ratio;
        return out;
      }
      prev_ratio = ratio;
    }
    prev_panel = p.value;
  }
  throw QuadratureError("tail integral did not settle into geometric decay", out.value);
}

/// Safeguarded Newton iteration on a bracket [lo, hi] with f(lo), f(hi) of
/// opposite sign. `fd(x)` returns {f(x), f'(x)}. Stops when the step is below
/// `xtol` in absolute terms.
template <class FD>
double newton_bisect(const FD& fd, double lo, double hi, double x0, double xtol, int max_iter = 200) {
  auto [flo, dlo] = fd(lo);
  auto [fhi, dhi] = fd(hi);
  (void)dlo;
  (void)dhi;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) throw BracketError("root is not bracketed");
  const bool increasing = fhi > 0;
  double x = std::clamp(x0, std::min(lo, hi), std::max(lo, hi));
  double a = std::min(lo, hi), b = std::max(lo, hi);
  double width_mark = b - a;
  int slow = 0;
  for (int it = 0; it < max_iter; ++it) {
    auto [fx, dfx] = fd(x);
    if (fx == 0.0) return x;
    const bool below = increasing ? fx < 0 : fx > 0;
    if (below) a = x; else b = x;
    // Newton creeping along a steep exponential: fall back to bisection when
    // the bracket has not halved in two iterations.
    if (b - a > 0.5 * width_mark) {
      ++slow;
    } else {
      slow = 0;
      width_mark = b - a;
    }
    double next = x - fx / dfx;
    if (slow >= 2 || !(next > a && next < b) || !std::isfinite(next)) {
      next = 0.5 * (a + b);
      slow = 0;
      width_mark = b - a;
    }
    const double step = std::abs(next - x);
    x = next;
    if (step <= xtol || (b - a) <= xtol) return x;
  }
  throw ToleranceError("bracketed Newton iteration exhausted its budget", b - a);
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y ≈ intercept + slope·x.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) throw DomainError("line fit needs at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("line fit with degenerate abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

/// ln(e^a + e^b) without overflow; either argument may be -inf.
inline double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

/// ln(e^w - 1) for w ≥ 0, i.e. ln u when w = ln(1+u). Returns -inf at w = 0.
inline double log_expm1(double w) {
  if (w <= 0.0) return -std::numeric_limits<double>::infinity();
  if (w > 40.0) return w + std::log1p(-std::exp(-w));
  return std::log(std::expm1(w));
}

}  // namespace radlab
