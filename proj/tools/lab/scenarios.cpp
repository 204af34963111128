#include "lab/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "lab/table.hpp"
#include "radlab/growth.hpp"
#include "radlab/nonlinearity.hpp"
#include "radlab/parabolic_radial.hpp"
#include "radlab/scalar_ode.hpp"
#include "radlab/stationary_radial.hpp"
#include "radlab/threshold_analysis.hpp"

namespace lab {

using namespace radlab;
using json = nlohmann::ordered_json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double softplus(double y) { return y > 35.0 ? y + std::log1p(std::exp(-y)) : std::log1p(std::exp(y)); }

class Run {
 public:
  Run(const ExperimentConfig& c, const RunOptions& o) : c_(c), o_(o), tol_(Tolerances{}.scaled(o.tolerance_scale)) {
    m_.config = c;
    m_.tolerance_scale = o.tolerance_scale;
    std::filesystem::create_directories(o.out_dir);
  }

  RunManifest finish() {
    m_.files.push_back("manifest.json");
    write_text(path("manifest.json"), m_.to_json());
    return m_;
  }

  NonlinearitySpec spec() const {
    return c_.family == "power" ? NonlinearitySpec::power(c_.p) : NonlinearitySpec::log_power(c_.alpha);
  }

  GrowthFunction growth(const NonlinearitySpec& s) const {
    if (c_.growth == "exponential") return GrowthFunction::exponential();
    if (c_.growth == "profile") {
      const double reach = std::max({1.5 * c_.outer_radius, c_.n_list.empty() ? 0.0 : c_.n_list.back(), 1.0});
      return GrowthFunction::from_profile(shoot_V(s, c_.profile_center, c_.dimension, reach,
                                                  std::size_t(c_.intervals), tol_));
    }
    return GrowthFunction::power_law(c_.growth_K, c_.growth_beta);
  }

  SchemeOptions scheme_options() const {
    SchemeOptions so;
    so.dimension = c_.dimension;
    so.spacing = c_.spacing;
    so.monitor_radius = c_.monitor_radius;
    so.time.dt_max = c_.dt_max;
    so.threads = o_.threads;
    so.domination_search = c_.search_max;
    so.tol = tol_;
    return so;
  }

  void emit(const std::string& name, const Table& t) {
    write_csv(path(name), t);
    m_.files.push_back(name);
  }
  void emit_text(const std::string& name, const std::string& text) {
    write_text(path(name), text);
    m_.files.push_back(name);
  }

  void check(std::string name, bool ok, double value, double limit, std::string detail = {}) {
    m_.checks.push_back({std::move(name), ok, value, limit, std::move(detail)});
  }

  void tolerances(const std::string& op, json j) { m_.tolerances[op] = std::move(j); }
  json tol_flat() const { return {{"flat_root_rel", tol_.flat_root_rel}, {"quadrature_rel", tol_.quadrature_rel}}; }
  json tol_shoot() const { return {{"rk_rel", tol_.rk_rel}}; }
  json tol_evolve() const {
    return {{"newton", tol_.newton},
            {"newton_max_iter", tol_.newton_max_iter},
            {"damping_halvings", tol_.damping_halvings},
            {"spacing", c_.spacing},
            {"dt_max", c_.dt_max},
            {"discretization_tol", c_.spacing * c_.spacing}};
  }

  json& results() { return m_.results; }
  const ExperimentConfig& cfg() const { return c_; }
  const Tolerances& tol() const { return tol_; }

 private:
  std::string path(const std::string& name) const { return (std::filesystem::path(o_.out_dir) / name).string(); }

  const ExperimentConfig& c_;
  const RunOptions& o_;
  Tolerances tol_;
  RunManifest m_;
};

void field_rows(Table& t, const std::vector<Cell>& prefix, const EvolutionField& f) {
  for (std::size_t i = 0; i < f.times.size(); ++i) {
    for (std::size_t j = 0; j < f.grid.size(); ++j) {
      std::vector<std::string> row;
      for (const auto& p : prefix) row.push_back(p.text);
      row.push_back(Cell(f.times[i]).text);
      row.push_back(Cell(f.grid.radii[j]).text);
      row.push_back(Cell(f.values[i][j]).text);
      row.push_back(Cell(f.u(i, j)).text);
      t.rows.push_back(std::move(row));
    }
  }
}

void conditions(Run& run) {
  const auto spec = run.spec();
  const ConditionReport rep = classify_conditions(spec);
  Table t({"family", "parameter", "H1", "H1_1", "H2", "analytic", "osgood_slope", "keller_osserman_slope"});
  t.add({spec.description(), spec.parameter(), rep.osgood_H1, rep.keller_osserman_H1_1, rep.H2, rep.analytic,
         rep.osgood_tail.slope, rep.keller_osserman_tail.slope});
  run.emit("conditions.csv", t);
  run.results()["H1"] = rep.osgood_H1;
  run.results()["H1-1"] = rep.keller_osserman_H1_1;
  run.results()["H2"] = rep.H2;
  run.results()["confidence"] = rep.confidence;
  run.tolerances("classify_conditions", {{"critical_band", kCriticalBand}, {"panels", 41}});
  run.check("numeric_agrees_with_analytic", rep.numeric_agrees, rep.confidence, kCriticalBand);
}

void flat_ode(Run& run) {
  const auto& c = run.cfg();
  const auto spec = run.spec();
  const bool osgood = osgood_holds(spec);
  Table t({"a", "t", "phi", "log_phi"});
  double worst_closed = 0.0, worst_inf = 0.0;
  bool time_monotone = true, data_monotone = true, dominated = true;
  std::vector<double> prev;
  std::vector<double> log_inf(c.times.size(), kInf);
  if (osgood) {
    for (std::size_t i = 0; i < c.times.size(); ++i) {
      if (c.times[i] > 0.0) log_inf[i] = solve_phi_infinity_log(spec, c.times[i], run.tol());
    }
  }
  for (double a : c.a_list) {
    const FlatTrajectory tr = solve_phi(spec, a, c.times, run.tol());
    for (std::size_t i = 0; i < c.times.size(); ++i) {
      t.add({a, c.times[i], tr.values[i], tr.log_values[i]});
      if (i > 0 && !(tr.values[i] < tr.values[i - 1])) time_monotone = false;
      if (!prev.empty() && tr.values[i] < prev[i]) data_monotone = false;
      if (tr.log_values[i] > log_inf[i] + 1e-9) dominated = false;
      if (spec.family() == Family::Power) {
        const double q = c.p - 1.0;
        const double exact = a / std::pow(1.0 + q * std::pow(a, q) * c.times[i], 1.0 / q);
        worst_closed = std::max(worst_closed, std::abs(tr.values[i] / exact - 1.0));
      }
    }
    prev = tr.values;
  }
  if (osgood) {
    for (std::size_t i = 0; i < c.times.size(); ++i) {
      if (c.times[i] <= 0.0) continue;
      t.add({kInf, c.times[i], std::exp(log_inf[i]), log_inf[i]});
      if (spec.family() == Family::Power) {
        const double q = c.p - 1.0;
        worst_inf = std::max(worst_inf, std::abs(std::exp(log_inf[i]) * std::pow(q * c.times[i], 1.0 / q) - 1.0));
      }
    }
  }
  run.emit("flat.csv", t);
  run.tolerances("solve_phi", run.tol_flat());
  if (osgood) run.tolerances("solve_phi_infinity", run.tol_flat());
  run.check("decreasing_in_time", time_monotone, 0, 0);
  run.check("increasing_in_data", data_monotone, 0, 0);
  if (osgood) run.check("dominated_by_infinite_data", dominated, 0, 0);
  if (spec.family() == Family::Power) {
    run.check("closed_form_finite_data", worst_closed <= 1e-8, worst_closed, 1e-8);
    if (osgood) run.check("closed_form_infinite_data", worst_inf <= 1e-8, worst_inf, 1e-8);
  }
}

void stationary(Run& run) {
  const auto& c = run.cfg();
  const auto spec = run.spec();
  const RadialProfile prof = shoot_V(spec, c.center, c.dimension, c.r_max, std::size_t(c.intervals), run.tol());
  Table t({"r", "W", "dW", "V_clipped"});
  bool nondecreasing = true;
  for (std::size_t j = 0; j < prof.radii.size(); ++j) {
    t.add({prof.radii[j], prof.w_values[j], prof.dw_values[j], prof.v_clipped(j)});
    if (j > 0 && prof.w_values[j] < prof.w_values[j - 1]) nondecreasing = false;
  }
  run.emit("profile.csv", t);
  run.tolerances("shoot_V", run.tol_shoot());
  run.check("nondecreasing", nondecreasing, 0, 0);

  Table b({"R", "log_V", "log_bound", "holds"});
  bool all = true;
  for (double R : c.radii) {
    if (R > c.r_max) continue;
    const double lv = std::log(std::expm1(prof.w_at(R)));
    const double lb = apriori_bound_log(spec, c.center, R, run.tol());
    b.add({R, lv, lb, lv <= lb});
    all = all && lv <= lb;
  }
  run.emit("apriori.csv", b);
  run.tolerances("apriori_bound", {{"apriori_rel", run.tol().apriori_rel}});
  run.check("apriori_bound", all, 0, 0);

  if (spec.family() == Family::LogPower && c.alpha > 1.0 && c.alpha <= 2.0) {
    try {
      const FitReport f = verify_asymptotics(prof, c.alpha);
      json j{{"exponent_hat", f.exponent_hat},     {"target_exponent", f.target_exponent},
             {"constant_hat", f.constant_hat},     {"target_constant", f.target_constant},
             {"free_constant", f.free_constant},   {"linearized_constant", f.linearized_constant},
             {"shift", f.shift},                   {"window", {f.window_lo, f.window_hi}},
             {"points", f.points}};
      run.emit_text("asymptotics.json", j.dump(2) + "\n");
      run.results()["asymptotics"] = j;
      if (f.log_linear) {
        const double dev = std::abs(f.exponent_hat - 1.0);
        run.check("log_linear_slope", dev <= 0.05, f.exponent_hat, 0.05);
      } else {
        const double de = std::abs(f.exponent_hat / f.target_exponent - 1.0);
        const double dc = std::abs(f.constant_hat / f.target_constant - 1.0);
        run.check("growth_exponent", de <= 0.02, f.exponent_hat, 0.02);
        run.check("growth_constant", dc <= 0.10, f.constant_hat, 0.10);
      }
    } catch (const InsufficientRange& e) {
      run.check("asymptotic_range", false, 0, 10, e.what());
    }
  }
}

void capped_data(Run& run) {
  const auto& c = run.cfg();
  const auto spec = run.spec();
  const auto g = run.growth(spec);
  const SchemeOptions so = run.scheme_options();
  const double h2 = c.spacing * c.spacing;
  Table fields({"a", "n", "t", "r", "W", "u"});
  Table summary({"a", "domination_radius", "below_domination_radius", "monotone_margin", "subsolution_excess"});
  Table center({"a", "t", "u_center", "lower_bound"});
  double worst_margin = 0.0, worst_sub = -kInf;
  bool lower_ok = true, increasing_a = true;
  int dominated_runs = 0;
  double prev_first = -kInf;
  std::vector<double> log_inf(c.times.size(), kInf);
  for (std::size_t i = 1; i < c.times.size(); ++i) log_inf[i] = solve_phi_infinity_log(spec, c.times[i], run.tol());
  for (double a : c.a_list) {
    const SchemeSequence seq = run_capped_scheme(spec, g, a, c.n_list, c.times, so);
    for (std::size_t k = 0; k < seq.fields.size(); ++k) field_rows(fields, {a, c.n_list[k]}, seq.fields[k]);
    summary.add({a, seq.domination_radius, seq.below_domination_radius, seq.monotone_margin, seq.subsolution_excess});
    worst_margin = std::max(worst_margin, seq.monotone_margin);
    if (!seq.below_domination_radius) worst_sub = std::max(worst_sub, seq.subsolution_excess);
    dominated_runs += seq.below_domination_radius ? 0 : 1;
    for (std::size_t i = 1; i < c.times.size(); ++i) {
      const double u0 = seq.limit().u(i, 0);
      const double bound = a - std::exp(log_inf[i]) - 0.05 * a;
      center.add({a, c.times[i], u0, bound});
      lower_ok = lower_ok && u0 >= bound;
    }
    const double first = seq.limit().u(1, 0);
    if (!(first > prev_first)) increasing_a = false;
    prev_first = first;
  }
  run.emit("capped_fields.csv", fields);
  run.emit("capped_summary.csv", summary);
  run.emit("capped_center.csv", center);
  run.tolerances("evolve", run.tol_evolve());
  run.tolerances("compute_r_n", {{"crossing_rel", run.tol().crossing_rel}, {"rk_rel", run.tol().rk_rel}});
  run.tolerances("solve_phi_infinity", run.tol_flat());
  run.check("decreasing_in_n", worst_margin <= h2, worst_margin, h2);
  run.check("lower_bound_by_flat_solution", lower_ok, 0, 0);
  run.check("increasing_in_a", increasing_a, 0, 0);
  run.results()["runs_beyond_domination_radius"] = dominated_runs;
  // V_a − Φ_∞ is a subsolution only once the data dominate V_a, i.e. n ≥ r_a.
  if (dominated_runs > 0) run.check("subsolution_below_flat", worst_sub <= 1e-9, worst_sub, 1e-9);
}

void truncated_data(Run& run) {
  const auto& c = run.cfg();
  const auto spec = run.spec();
  const auto g = run.growth(spec);
  const SchemeOptions so = run.scheme_options();
  const double h2 = c.spacing * c.spacing;
  const SchemeSequence seq = run_truncated_scheme(spec, g, c.n_list, c.outer_radius, c.times, so);
  Table fields({"n", "t", "r", "W", "u"});
  for (std::size_t k = 0; k < seq.fields.size(); ++k) field_rows(fields, {c.n_list[k]}, seq.fields[k]);
  run.emit("truncated_fields.csv", fields);

  const std::size_t it = c.times.size() - 1;
  const double lphi = solve_phi_infinity_log(spec, c.times[it], run.tol());
  Table gaps({"n", "t", "relative_gap"});
  std::vector<double> rel;
  for (std::size_t k = 0; k < seq.fields.size(); ++k) {
    const auto& f = seq.fields[k];
    double worst = 0.0;
    for (std::size_t j = 0; j < f.grid.size() && f.grid.radii[j] <= c.monitor_radius + 1e-12; ++j) {
      // |u − Φ_∞| / Φ_∞ with u = e^W − 1
      worst = std::max(worst, std::abs(std::expm1(log_expm1(f.values[it][j]) - lphi)));
    }
    rel.push_back(worst);
    gaps.add({c.n_list[k], c.times[it], worst});
  }
  run.emit("truncated_gaps.csv", gaps);
  bool decreasing = true;
  for (std::size_t k = 1; k < rel.size(); ++k) decreasing = decreasing && rel[k] < rel[k - 1];
  run.check("gap_decreasing_in_n", decreasing, rel.back(), 0);
  run.check("final_gap", rel.back() <= 0.05, rel.back(), 0.05);
  run.check("below_flat_bound", seq.excess_over_flat <= h2, seq.excess_over_flat, h2);
  run.check("domain_influence", seq.domain_influence <= h2, seq.domain_influence, h2);
  run.check("increasing_in_n", seq.monotone_margin <= h2, seq.monotone_margin, h2);
  run.emit_text("truncated_scheme.json", seq.to_json() + "\n");

  if (!c.radii.empty() && c.alpha < 2.0 && g.beta) {
    const ThresholdReport rep = threshold_report(g, c.alpha, c.dimension, c.radii, c.x);
    run.emit("threshold.csv", Table(parse_csv(rep.to_csv())));
    run.emit_text("threshold.json", rep.to_json() + "\n");
    run.results()["dimension_threshold_exceeded"] = rep.verdict.dimension_threshold_exceeded;
    run.results()["growth_threshold_exceeded"] = rep.verdict.growth_threshold_exceeded;
  }
  run.tolerances("evolve", run.tol_evolve());
  run.tolerances("solve_phi_infinity", run.tol_flat());
}

void non_uniqueness(Run& run) {
  const auto& c = run.cfg();
  const auto spec = run.spec();
  const auto g = run.growth(spec);
  const SchemeOptions so = run.scheme_options();
  const double h2 = c.spacing * c.spacing;
  const SchemeSequence minimal = run_truncated_scheme(spec, g, c.n_list, c.outer_radius, c.times, so);
  const SandwichResult sw = run_sandwich_scheme(spec, g, c.lower_center, c.upper_center, c.n_list, c.times, so);

  const std::size_t it = c.times.size() - 1;
  const double lphi = solve_phi_infinity_log(spec, c.times[it], run.tol());
  const RadialGrid grid = RadialGrid::with_spacing(c.n_list.front(), c.spacing, c.dimension);
  const auto wc = profile_on_grid(spec, c.lower_center, grid, run.tol());
  const double target = softplus(std::log(2.0) + lphi);  // ln(1 + 2Φ_∞(t))
  std::size_t js = 0;
  while (js < wc.size() && wc[js] < target) ++js;
  if (js == wc.size()) {
    run.check("witness_radius", false, wc.back(), target, "lower profile never reaches 2 Phi_inf inside n_list[0]");
    return;
  }
  const double r_star = grid.radii[js];
  const double w_min = minimal.limit().values[it][js];
  const double w_low = sw.lower.limit().values[it][js];
  Table t({"t", "r_star", "W_minimal", "W_lower", "W_lower_profile", "log_phi_infinity"});
  t.add({c.times[it], r_star, w_min, w_low, wc[js], lphi});
  run.emit("non_uniqueness.csv", t);
  Table fields({"family", "n", "t", "r", "W", "u"});
  for (std::size_t k = 0; k < c.n_list.size(); ++k) {
    field_rows(fields, {"minimal", c.n_list[k]}, minimal.fields[k]);
    field_rows(fields, {"lower", c.n_list[k]}, sw.lower.fields[k]);
    field_rows(fields, {"upper", c.n_list[k]}, sw.upper.fields[k]);
  }
  run.emit("non_uniqueness_fields.csv", fields);

  run.results()["r_star"] = r_star;
  run.tolerances("evolve", run.tol_evolve());
  run.tolerances("solve_phi_infinity", run.tol_flat());
  run.check("minimal_below_flat", minimal.excess_over_flat <= h2, minimal.excess_over_flat, h2);
  run.check("lower_above_profile", w_low >= wc[js] - h2, w_low - wc[js], -h2);
  run.check("sandwich_lower", sw.lower_sandwich_margin >= -h2, sw.lower_sandwich_margin, -h2);
  run.check("sandwich_upper", sw.upper_sandwich_margin >= -h2, sw.upper_sandwich_margin, -h2);
  // u_lower − u_minimal ≥ V_c(r*) − Φ_∞(t) − 2 tol, with tol = h² (1 + V_c(r*))
  const double tol_u = h2 * std::exp(wc[js]);
  const double diff = std::expm1(w_low) - std::expm1(w_min);
  const double need = std::expm1(wc[js]) - std::exp(lphi) - 2.0 * tol_u;
  run.check("distinct_solutions", diff >= need && need > 0.0, diff, need);
}

void alpha2(Run& run) {
  const auto& c = run.cfg();
  const auto spec = NonlinearitySpec::log_power(2.0);
  const auto g = run.growth(spec);
  Table t({"r_n", "gamma_rn", "t_n", "B_n", "leading", "relative_leading_gap", "nu", "crude_absorption",
           "absorption_integral", "log_I_n"});
  double prevB = kInf, prevRel = kInf;
  bool decreasing = true, improving = true, closed_bound = true;
  for (double r : c.radii) {
    const double gam = g.gamma(r);
    const Alpha2Result a = alpha2_B_n(1.0, c.x, r, gam, c.dimension);
    const double rel = std::abs(a.at_max - a.leading) / (r * gam);
    const double crude = a.t_max * gam * gam;  // t γ^α with α = 2
    const double exact = flat_absorption_integral(spec, log_expm1(gam), a.t_max, run.tol());
    const double logI = c.dimension == 1 ? I_n_quadrature(a.t_max, c.x, r, g, a.t_max * gam * gam, 1) : kInf;
    t.add({r, gam, a.t_max, a.at_max, a.leading, rel, a.nu, crude, exact, logI});
    decreasing = decreasing && a.at_max < prevB;
    improving = improving && rel < prevRel;
    closed_bound = closed_bound && crude >= exact;
    prevB = a.at_max;
    prevRel = rel;
  }
  run.emit("alpha2.csv", t);
  run.tolerances("flat_absorption_integral", run.tol_flat());
  run.check("B_decreasing_along_r", decreasing, prevB, 0);
  run.check("leading_form_improving", improving, prevRel, 0);
  run.check("closed_absorption_bound", closed_bound, 0, 0);
}

}  // namespace

bool RunManifest::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::string RunManifest::to_json() const {
  json j;
  j["tool"] = version;
  j["scenario"] = scenario_name(config.scenario);
  json cfg = json::object();
  std::stringstream ss(serialize_config(config));
  std::string line;
  while (std::getline(ss, line)) {
    const auto eq = line.find(" = ");
    cfg[line.substr(0, eq)] = line.substr(eq + 3);
  }
  j["config"] = cfg;
  j["tolerance_scale"] = tolerance_scale;
  j["tolerances"] = tolerances;
  j["results"] = results;
  json cs = json::array();
  for (const auto& c : checks) {
    json e{{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"limit", c.limit}};
    if (!c.detail.empty()) e["detail"] = c.detail;
    cs.push_back(e);
  }
  j["checks"] = cs;
  j["all_passed"] = all_passed();
  j["files"] = files;
  return j.dump(2) + "\n";
}

RunManifest run(const ExperimentConfig& config, const RunOptions& opt) {
  validate(config);
  Run r(config, opt);
  switch (config.scenario) {
    case Scenario::Conditions: conditions(r); break;
    case Scenario::FlatODE: flat_ode(r); break;
    case Scenario::Stationary: stationary(r); break;
    case Scenario::CappedData: capped_data(r); break;
    case Scenario::TruncatedData: truncated_data(r); break;
    case Scenario::NonUniqueness: non_uniqueness(r); break;
    case Scenario::Alpha2Remark: alpha2(r); break;
  }
  return r.finish();
}

}  // namespace lab
