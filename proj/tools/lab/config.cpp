#include "lab/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <variant>

namespace lab {

namespace {

using Field = std::variant<double ExperimentConfig::*, int ExperimentConfig::*, std::string ExperimentConfig::*,
                           std::vector<double> ExperimentConfig::*>;

struct Key {
  const char* name;
  Field field;
  const char* doc;
};

const std::vector<Key>& keys() {
  static const std::vector<Key> k{
      {"family", &ExperimentConfig::family, "log-power (h = ln^alpha(1+s)) or power (h = s^(p-1))"},
      {"alpha", &ExperimentConfig::alpha, "log-power exponent, > 0"},
      {"p", &ExperimentConfig::p, "power exponent, > 1"},
      {"dimension", &ExperimentConfig::dimension, "space dimension N >= 1"},
      {"growth", &ExperimentConfig::growth, "initial growth: power-law (gamma = K r^beta), exponential, profile"},
      {"growth_K", &ExperimentConfig::growth_K, "power-law coefficient K >= 0"},
      {"growth_beta", &ExperimentConfig::growth_beta, "power-law exponent beta > 0"},
      {"center", &ExperimentConfig::center, "stationary profile center value V(0) > 0"},
      {"r_max", &ExperimentConfig::r_max, "stationary profile outer radius"},
      {"intervals", &ExperimentConfig::intervals, "stationary profile grid intervals"},
      {"spacing", &ExperimentConfig::spacing, "parabolic grid spacing h"},
      {"dt_max", &ExperimentConfig::dt_max, "largest time step"},
      {"outer_radius", &ExperimentConfig::outer_radius, "outer radius of the truncated-data runs"},
      {"monitor_radius", &ExperimentConfig::monitor_radius, "radius of the monitored region"},
      {"search_max", &ExperimentConfig::search_max, "search range for the domination radius"},
      {"profile_center", &ExperimentConfig::profile_center, "growth = profile: center value of the profile"},
      {"lower_center", &ExperimentConfig::lower_center, "sandwich lower profile center value c"},
      {"upper_center", &ExperimentConfig::upper_center, "sandwich upper profile center value b"},
      {"x", &ExperimentConfig::x, "evaluation point |x| of the threshold functionals"},
      {"times", &ExperimentConfig::times, "output times, comma separated, first entry 0"},
      {"n_list", &ExperimentConfig::n_list, "ball radii, comma separated, increasing"},
      {"a_list", &ExperimentConfig::a_list, "data values, comma separated, increasing"},
      {"radii", &ExperimentConfig::radii, "radii for bounds and threshold tables, comma separated"},
  };
  return k;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError("key '" + key + "': empty number");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE) {
    throw ConfigError("key '" + key + "': '" + t + "' is not a number");
  }
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  const double v = parse_number(key, text);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("key '" + key + "': expected an integer");
  return int(v);
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(key, item));
  if (out.empty()) throw ConfigError("key '" + key + "': list must not be empty");
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

bool increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) return false;
  }
  return true;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> n{"conditions", "flat-ode",       "stationary", "theorem-b",
                                          "theorem-c",  "non-uniqueness", "alpha2"};
  return n;
}

std::string scenario_name(Scenario s) { return scenario_names().at(std::size_t(s)); }

Scenario scenario_from_name(const std::string& name) {
  const auto& n = scenario_names();
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] == name) return Scenario(i);
  }
  throw ConfigError("unknown scenario '" + name + "'");
}

ExperimentConfig ExperimentConfig::defaults(Scenario s) {
  ExperimentConfig c;
  c.scenario = s;
  switch (s) {
    case Scenario::Conditions:
      break;
    case Scenario::FlatODE:
      c.family = "power";
      c.a_list = {0.5, 1.0, 10.0};
      for (int i = 0; i <= 20; ++i) c.times.push_back(0.05 * i);
      break;
    case Scenario::Stationary:
      c.dimension = 3;
      c.radii = {1.0, 2.0, 4.0};
      break;
    case Scenario::CappedData:
      c.growth_K = 2.0 * 0.00390625;
      c.a_list = {2.0, 4.0, 8.0};
      c.n_list = {4.0, 6.0, 8.0};
      c.times = {0.0, 0.25, 0.5};
      break;
    case Scenario::TruncatedData:
      c.growth_K = 2.0;
      c.n_list = {3.0, 4.0, 5.0, 6.0};
      c.times = {0.0, 0.25, 0.5};
      c.radii = {10.0, 20.0, 40.0, 80.0};
      break;
    case Scenario::NonUniqueness:
      c.growth = "profile";
      c.n_list = {8.0, 10.0, 12.0};
      c.outer_radius = 16.0;
      c.times = {0.0, 0.5, 1.0};
      break;
    case Scenario::Alpha2Remark:
      c.alpha = 2.0;
      c.growth = "exponential";
      c.radii = {5.0, 10.0, 20.0, 40.0};
      break;
  }
  return c;
}

const std::vector<KeyDoc>& schema() {
  static const std::vector<KeyDoc> docs = [] {
    std::vector<KeyDoc> d{{"scenario", "text", "must match the subcommand when present"}};
    for (const auto& k : keys()) {
      const char* type = std::visit(
          [](auto ptr) -> const char* {
            using T = std::remove_cvref_t<decltype(std::declval<ExperimentConfig>().*ptr)>;
            if constexpr (std::is_same_v<T, double>) return "number";
            else if constexpr (std::is_same_v<T, int>) return "integer";
            else if constexpr (std::is_same_v<T, std::string>) return "text";
            else return "number list";
          },
          k.field);
      d.push_back({k.name, type, k.doc});
    }
    return d;
  }();
  return docs;
}

ExperimentConfig parse_config(const std::string& text, Scenario scenario) {
  ExperimentConfig c = ExperimentConfig::defaults(scenario);
  std::set<std::string> seen;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError("line " + std::to_string(lineno) + ": repeated key '" + key + "'");
    if (key == "scenario") {
      if (scenario_from_name(value) != scenario) {
        throw ConfigError("config is for scenario '" + value + "' but '" + scenario_name(scenario) + "' was requested");
      }
      continue;
    }
    bool known = false;
    for (const auto& k : keys()) {
      if (key != k.name) continue;
      known = true;
      std::visit(
          [&](auto ptr) {
            using T = std::remove_cvref_t<decltype(c.*ptr)>;
            if constexpr (std::is_same_v<T, double>) c.*ptr = parse_number(key, value);
            else if constexpr (std::is_same_v<T, int>) c.*ptr = parse_int(key, value);
            else if constexpr (std::is_same_v<T, std::string>) c.*ptr = value;
            else c.*ptr = parse_list(key, value);
          },
          k.field);
    }
    if (!known) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path, Scenario scenario) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), scenario);
}

std::string serialize_config(const ExperimentConfig& c) {
  std::string out = "scenario = " + scenario_name(c.scenario) + "\n";
  for (const auto& k : keys()) {
    std::visit(
        [&](auto ptr) {
          using T = std::remove_cvref_t<decltype(c.*ptr)>;
          const std::string lhs = std::string(k.name) + " = ";
          if constexpr (std::is_same_v<T, double>) out += lhs + format_double(c.*ptr) + "\n";
          else if constexpr (std::is_same_v<T, int>) out += lhs + std::to_string(c.*ptr) + "\n";
          else if constexpr (std::is_same_v<T, std::string>) out += lhs + c.*ptr + "\n";
          else if (!(c.*ptr).empty()) out += lhs + join(c.*ptr) + "\n";  // unused lists are omitted
        },
        k.field);
  }
  return out;
}

void validate(const ExperimentConfig& c) {
  require(c.family == "log-power" || c.family == "power", "family must be log-power or power");
  require(c.alpha > 0.0 && std::isfinite(c.alpha), "alpha must be positive");
  require(c.p > 1.0 && std::isfinite(c.p), "p must exceed 1");
  require(c.dimension >= 1 && c.dimension <= 64, "dimension must be between 1 and 64");
  require(c.growth == "power-law" || c.growth == "exponential" || c.growth == "profile",
          "growth must be power-law, exponential or profile");
  require(c.growth_K >= 0.0 && c.growth_beta > 0.0, "growth needs K >= 0 and beta > 0");
  require(c.center > 0.0 && c.r_max > 0.0 && c.intervals >= 16, "stationary settings out of range");
  require(c.spacing > 0.0 && c.spacing <= 0.5, "spacing must be in (0, 0.5]");
  require(c.dt_max >= 1e-6 && c.dt_max <= 0.1, "dt_max must be in [1e-6, 0.1]");
  require(c.outer_radius > 0.0 && c.monitor_radius > 0.0 && c.search_max > 0.0, "radii must be positive");
  require(c.profile_center > 0.0 && c.lower_center > 0.0 && c.upper_center > c.lower_center,
          "profile centers must satisfy 0 < lower_center < upper_center");
  require(increasing(c.n_list) && increasing(c.a_list), "n_list and a_list must be increasing");
  for (double v : c.n_list) require(v > 0.0, "n_list entries must be positive");
  for (double v : c.a_list) require(v > 0.0, "a_list entries must be positive");
  for (double v : c.radii) require(v > 0.0, "radii must be positive");
  require(increasing(c.times), "times must be increasing");
  if (!c.times.empty()) require(c.times.front() >= 0.0, "times must be nonnegative");

  switch (c.scenario) {
    case Scenario::FlatODE:
      require(!c.a_list.empty() && !c.times.empty(), "flat-ode needs a_list and times");
      break;
    case Scenario::CappedData:
    case Scenario::TruncatedData:
    case Scenario::NonUniqueness:
      require(!c.n_list.empty(), "n_list must not be empty");
      require(c.times.size() >= 2 && c.times.front() == 0.0, "times must start at 0 and contain a positive time");
      require(c.family == "log-power", "parabolic scenarios use the log-power family");
      if (c.scenario == Scenario::CappedData) require(!c.a_list.empty(), "theorem-b needs a_list");
      if (c.scenario != Scenario::CappedData) {
        require(c.n_list.back() < c.outer_radius, "n_list must stay below outer_radius");
      }
      break;
    case Scenario::Alpha2Remark:
      require(c.radii.size() >= 2, "alpha2 needs at least two radii");
      break;
    default:
      break;
  }
}

}  // namespace lab
