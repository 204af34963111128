#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lab {

/// Any problem with the configuration file or the command line (exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Scenario { Conditions, FlatODE, Stationary, CappedData, TruncatedData, NonUniqueness, Alpha2Remark };

std::string scenario_name(Scenario s);
Scenario scenario_from_name(const std::string& name);
const std::vector<std::string>& scenario_names();

/// Experiment description. Every field has a key in the flat key = value
/// format; see `schema()` for the documented list.
struct ExperimentConfig {
  Scenario scenario = Scenario::Conditions;
  std::string family = "log-power";  // log-power | power
  double alpha = 1.5;
  double p = 2.0;
  int dimension = 1;
  std::string growth = "power-law";  // power-law | exponential | profile
  double growth_K = 1.0;
  double growth_beta = 4.0;
  double center = 1.0;          // stationary: V(0)
  double r_max = 40.0;
  int intervals = 2000;
  double spacing = 0.02;
  double dt_max = 1e-3;
  double outer_radius = 8.0;
  double monitor_radius = 1.0;
  double search_max = 60.0;
  double profile_center = 1.5;  // growth = profile: g = V_{profile_center}
  double lower_center = 1.0;
  double upper_center = 2.0;
  double x = 0.0;
  std::vector<double> times;
  std::vector<double> n_list;
  std::vector<double> a_list;
  std::vector<double> radii;

  static ExperimentConfig defaults(Scenario s);
  bool operator==(const ExperimentConfig&) const = default;
};

struct KeyDoc {
  std::string key;
  std::string type;
  std::string doc;
};
const std::vector<KeyDoc>& schema();

/// Parses `key = value` lines on top of the scenario defaults. Blank lines and
/// lines starting with '#' are ignored; unknown or repeated keys are errors.
ExperimentConfig parse_config(const std::string& text, Scenario scenario);
ExperimentConfig load_config(const std::string& path, Scenario scenario);
/// Every key, one per line, numbers with 17 significant digits.
std::string serialize_config(const ExperimentConfig& c);
/// Range checks; throws ConfigError.
void validate(const ExperimentConfig& c);

std::string format_double(double v);

}  // namespace lab
