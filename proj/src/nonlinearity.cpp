#include "radlab/nonlinearity.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace radlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ln(1 + e^y) without overflow.
double softplus(double y) {
  if (y > 35.0) return y + std::log1p(std::exp(-y));
  return std::log1p(std::exp(y));
}

}  // namespace

NonlinearitySpec NonlinearitySpec::log_power(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("log-power exponent must be positive");
  NonlinearitySpec s;
  s.family_ = Family::LogPower;
  s.param_ = alpha;
  s.label_ = "log_power(alpha=" + std::to_string(alpha) + ")";
  return s;
}

NonlinearitySpec NonlinearitySpec::power(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("power exponent must exceed 1");
  NonlinearitySpec s;
  s.family_ = Family::Power;
  s.param_ = p;
  s.label_ = "power(p=" + std::to_string(p) + ")";
  return s;
}

NonlinearitySpec NonlinearitySpec::custom(Scalar h, double loglog_slope, std::string label, Scalar h_of_w) {
  if (!h) throw DomainError("custom nonlinearity needs a function");
  if (!std::isfinite(loglog_slope)) throw DomainError("custom nonlinearity needs a finite declared slope");
  if (h(0.0) != 0.0) throw DomainError("custom nonlinearity must vanish at 0");
  double prev = 0.0;
  for (int k = -20; k <= 40; ++k) {
    const double v = h(std::ldexp(1.0, k));
    if (!(v >= prev)) throw DomainError("custom nonlinearity is not nondecreasing on the sample grid");
    prev = v;
  }
  NonlinearitySpec s;
  s.family_ = Family::Custom;
  s.param_ = loglog_slope;
  s.label_ = label.empty() ? "custom" : std::move(label);
  s.custom_h_ = std::make_shared<const Scalar>(std::move(h));
  if (h_of_w) s.custom_k_ = std::make_shared<const Scalar>(std::move(h_of_w));
  return s;
}

double NonlinearitySpec::h(double s) const {
  if (!(s >= 0.0)) throw DomainError("h evaluated at a negative argument");
  switch (family_) {
    case Family::LogPower:
      return std::pow(std::log1p(s), param_);
    case Family::Power:
      return std::pow(s, param_ - 1.0);
    case Family::Custom:
      return (*custom_h_)(s);
  }
  return 0.0;
}

double NonlinearitySpec::h_at_log(double y) const {
  switch (family_) {
    case Family::LogPower:
      return std::pow(softplus(y), param_);
    case Family::Power:
      return std::exp((param_ - 1.0) * y);
    case Family::Custom:
      if (custom_k_) return (*custom_k_)(softplus(y));
      return (*custom_h_)(std::exp(y));
  }
  return 0.0;
}

double NonlinearitySpec::dh_at_log(double y) const {
  switch (family_) {
    case Family::LogPower: {
      const double l = softplus(y);
      return param_ * std::pow(l, param_ - 1.0) / (1.0 + std::exp(-y));
    }
    case Family::Power:
      return (param_ - 1.0) * std::exp((param_ - 1.0) * y);
    case Family::Custom: {
      const double d = 1e-5 * std::max(1.0, std::abs(y));
      return (h_at_log(y + d) - h_at_log(y - d)) / (2.0 * d);
    }
  }
  return 0.0;
}

double NonlinearitySpec::k(double w) const {
  if (w <= 0.0) return 0.0;
  switch (family_) {
    case Family::LogPower:
      return std::pow(w, param_);
    case Family::Power:
      return std::pow(std::expm1(w), param_ - 1.0);
    case Family::Custom:
      if (custom_k_) return (*custom_k_)(w);
      return (*custom_h_)(std::expm1(w));
  }
  return 0.0;
}

double NonlinearitySpec::dk(double w) const {
  switch (family_) {
    case Family::LogPower:
      if (w <= 0.0) return param_ > 1.0 ? 0.0 : (param_ == 1.0 ? 1.0 : kInf);
      return param_ * std::pow(w, param_ - 1.0);
    case Family::Power: {
      if (w <= 0.0) return param_ > 2.0 ? 0.0 : (param_ == 2.0 ? 1.0 : kInf);
      return (param_ - 1.0) * std::pow(std::expm1(w), param_ - 2.0) * std::exp(w);
    }
    case Family::Custom: {
      const double d = 1e-6 * std::max(1.0, w);
      const double lo = std::max(0.0, w - d);
      return (k(w + d) - k(lo)) / (w + d - lo);
    }
  }
  return 0.0;
}

double NonlinearitySpec::log_H_at_log(double y, double rel_tol) const {
  if (family_ == Family::Power) return (param_ + 1.0) * y - std::log(param_ + 1.0);
  // H(e^y) = e^{2y} ∫_{-∞}^{y} e^{2(u-y)} h(e^u) du; the weight is below e^{-80}
  // beyond 40 units.
  auto f = [&](double u) { return std::exp(2.0 * (u - y)) * h_at_log(u); };
  const double inner = integrate(f, y - 40.0, y, rel_tol).value;
  return 2.0 * y + std::log(inner);
}

double eval_h(const NonlinearitySpec& spec, double s) { return spec.h(s); }

double eval_H(const NonlinearitySpec& spec, double s, double rel_tol) {
  if (!(s >= 0.0)) throw DomainError("H evaluated at a negative argument");
  if (s == 0.0) return 0.0;
  if (spec.family() == Family::Power) {
    const double p = spec.parameter();
    return std::pow(s, p + 1.0) / (p + 1.0);
  }
  return std::exp(spec.log_H_at_log(std::log(s), rel_tol));
}

double eval_H_quadrature(const NonlinearitySpec& spec, double s, double rel_tol) {
  if (!(s >= 0.0)) throw DomainError("H evaluated at a negative argument");
  if (s == 0.0) return 0.0;
  return integrate([&](double t) { return t * spec.h(t); }, 0.0, s, rel_tol).value;
}

namespace {

// Panels over [2^k, 2^{k+1}] of an integrand given in the variable u = ln s.
template <class F>
TailDiagnostics classify_tail(const F& integrand_in_log) {
  constexpr int kLast = 40;
  constexpr int kFirstFit = 20;
  const double ln2 = std::log(2.0);
  std::vector<double> panels(kLast + 1);
  for (int k = 0; k <= kLast; ++k) {
    panels[k] = integrate(integrand_in_log, k * ln2, (k + 1) * ln2, 1e-10).value;
  }
  TailDiagnostics d;
  for (double p : panels) d.partial_sum += p;
  std::vector<double> xs, ys;
  bool underflow = false;
  for (int k = kFirstFit; k <= kLast; ++k) {
    if (!(panels[k] > 0.0) || !std::isfinite(std::log(panels[k]))) {
      underflow = true;
      break;
    }
    xs.push_back(std::log((k + 0.5) * ln2));
    ys.push_back(std::log(panels[k]));
  }
  if (underflow) {
    d.slope = -kInf;
    d.converges = true;
    d.extrapolated_sum = d.partial_sum;
    return d;
  }
  LineFit fit = fit_line(xs, ys);
  d.slope = fit.slope;
  d.intercept = fit.intercept;
  d.r_squared = fit.r_squared;
  d.inconclusive = std::abs(fit.slope + 1.0) <= kCriticalBand;
  d.converges = fit.slope < -1.0;
  if (d.converges) {
    // Remainder of a sum of panels behaving like c·(k+1/2)^slope.
    const double s = fit.slope;
    const double last = panels[kLast];
    const double remainder = last * (kLast + 0.5) / (-s - 1.0) * std::pow((kLast + 1.0) / (kLast + 0.5), s + 1.0);
    d.extrapolated_sum = d.partial_sum + remainder;
  } else {
    d.extrapolated_sum = kInf;
  }
  return d;
}

}  // namespace

ConditionReport classify_conditions(const NonlinearitySpec& spec) {
  ConditionReport rep;
  rep.osgood_tail = classify_tail([&](double u) { return 1.0 / spec.h_at_log(u); });
  rep.keller_osserman_tail =
      classify_tail([&](double u) { return std::exp(u - 0.5 * spec.log_H_at_log(u)); });
  rep.confidence = std::min(std::abs(rep.osgood_tail.slope + 1.0), std::abs(rep.keller_osserman_tail.slope + 1.0)) -
                   kCriticalBand;
  if (std::isnan(rep.confidence)) rep.confidence = kInf;

  switch (spec.family()) {
    case Family::LogPower:
      rep.analytic = true;
      rep.osgood_H1 = spec.parameter() > 1.0;
      rep.keller_osserman_H1_1 = spec.parameter() > 2.0;
      break;
    case Family::Power:
      rep.analytic = true;
      rep.osgood_H1 = true;
      rep.keller_osserman_H1_1 = true;
      break;
    case Family::Custom:
      if (rep.osgood_tail.inconclusive) {
        throw InconclusiveClassification("Osgood tail slope inside the critical band", rep.osgood_tail.slope);
      }
      if (rep.keller_osserman_tail.inconclusive) {
        throw InconclusiveClassification("Keller-Osserman tail slope inside the critical band",
                                         rep.keller_osserman_tail.slope);
      }
      rep.osgood_H1 = rep.osgood_tail.converges;
      rep.keller_osserman_H1_1 = rep.keller_osserman_tail.converges;
      break;
  }
  rep.H2 = !rep.keller_osserman_H1_1;
  if (rep.analytic) {
    const auto& o = rep.osgood_tail;
    const auto& k = rep.keller_osserman_tail;
    if (!o.inconclusive && o.converges != rep.osgood_H1) rep.numeric_agrees = false;
    if (!k.inconclusive && k.converges != rep.keller_osserman_H1_1) rep.numeric_agrees = false;
  }
  return rep;
}

bool osgood_holds(const NonlinearitySpec& spec) {
  switch (spec.family()) {
    case Family::LogPower:
      return spec.parameter() > 1.0;
    case Family::Power:
      return true;
    case Family::Custom:
      return classify_conditions(spec).osgood_H1;
  }
  return false;
}

bool keller_osserman_holds(const NonlinearitySpec& spec) {
  switch (spec.family()) {
    case Family::LogPower:
      return spec.parameter() > 2.0;
    case Family::Power:
      return true;
    case Family::Custom:
      return classify_conditions(spec).keller_osserman_H1_1;
  }
  return false;
}

}  // namespace radlab
