// Command-line front end: one subcommand per scenario.
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lab/config.hpp"
#include "lab/scenarios.hpp"
#include "radlab/errors.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;

unsigned threads_from_env() {
  const char* v = std::getenv("RADLAB_THREADS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1 || n > 256) throw lab::ConfigError(std::string("RADLAB_THREADS must be 1..256, got '") + v + "'");
  return unsigned(n);
}

void print_checks(const lab::RunManifest& m) {
  for (const auto& c : m.checks) {
    std::printf("%-4s %-34s value=%s limit=%s%s%s\n", c.passed ? "ok" : "FAIL", c.name.c_str(),
                lab::format_double(c.value).c_str(), lab::format_double(c.limit).c_str(),
                c.detail.empty() ? "" : "  ", c.detail.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial absorption experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  lab::RunOptions opt;
  app.add_option("--config", config_path, "key = value experiment file")->check(CLI::ExistingFile);
  app.add_option("--out", opt.out_dir, "output directory")->capture_default_str();
  app.add_option("--tolerance-scale", opt.tolerance_scale, "multiplies every solver tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  for (const auto& name : lab::scenario_names()) app.add_subcommand(name, "run the " + name + " scenario");
  app.footer("Environment: RADLAB_THREADS sets the number of worker threads (default 1).");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  lab::ExperimentConfig config;
  try {
    const auto scenario = lab::scenario_from_name(app.get_subcommands().front()->get_name());
    config = config_path.empty() ? lab::ExperimentConfig::defaults(scenario) : lab::load_config(config_path, scenario);
    lab::validate(config);
    opt.threads = threads_from_env();
  } catch (const lab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    const lab::RunManifest m = lab::run(config, opt);
    print_checks(m);
    std::printf("%s: %s (%s)\n", lab::scenario_name(config.scenario).c_str(), m.all_passed() ? "pass" : "fail",
                opt.out_dir.c_str());
    return m.all_passed() ? kPass : kNumericalFailure;
  } catch (const lab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
}
