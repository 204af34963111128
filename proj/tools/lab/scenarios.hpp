#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "lab/config.hpp"

namespace lab {

inline constexpr const char* kToolVersion = "radlab-lab 1.0.0";

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double limit = 0.0;
  std::string detail;
};

struct RunManifest {
  ExperimentConfig config;
  std::string version = kToolVersion;
  double tolerance_scale = 1.0;
  nlohmann::ordered_json tolerances = nlohmann::ordered_json::object();
  nlohmann::ordered_json results = nlohmann::ordered_json::object();
  std::vector<Check> checks;
  std::vector<std::string> files;  // relative to the output directory

  bool all_passed() const;
  std::string to_json() const;
};

struct RunOptions {
  std::string out_dir = "out";
  double tolerance_scale = 1.0;
  unsigned threads = 1;
};

/// Executes the scenario, writes its CSV/JSON files and manifest.json into
/// the output directory and returns the manifest. Numerical failures
/// propagate as radlab::Error.
RunManifest run(const ExperimentConfig& config, const RunOptions& opt);

}  // namespace lab
