#include <CLI11.hpp>
#include <iostream>

#include "gaugelab/errors.hpp"
#include "gaugelab/parallel.hpp"
#include "gaugelab/reports.hpp"

namespace {

constexpr int kFailure = 1;
constexpr int kConfigError = 2;

std::string key_help(const std::string& experiment) {
  std::string out = "Config keys for [" + experiment + "]:\n";
  for (const auto& k : gaugelab::experiment_keys(experiment))
    out += "  " + k.key + " = " + (k.default_value.empty() ? "(unset)" : k.default_value) + "  " + k.doc + "\n";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments for SU(2) connections on R^3"};
  app.set_version_flag("--version", gaugelab::kVersion);
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::uint64_t seed = 0;
  int threads = 0;
  bool assert_mode = false;
  for (const auto& name : gaugelab::experiment_names()) {
    auto* sub = app.add_subcommand(name, "Run the " + name + " experiment");
    sub->footer(key_help(name));
    sub->add_option("--config", config_path, "INI file with a [" + name + "] section")->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "report file")->required();
    sub->add_option("--seed", seed, "override the seed key");
    sub->add_option("--threads", threads, "worker threads (0 keeps the default)")->check(CLI::NonNegativeNumber);
    sub->add_flag("--assert", assert_mode, "exit nonzero when a check fails");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  const std::string experiment = app.get_subcommands().front()->get_name();
  const auto* sub = app.get_subcommands().front();

  try {
    if (threads > 0) gaugelab::set_thread_count(threads);
    auto config = config_path.empty() ? gaugelab::Config{} : gaugelab::Config::load(config_path);
    if (sub->count("--seed")) config.set(experiment, "seed", std::to_string(seed));
    const auto report = gaugelab::run_experiment(experiment, config);
    report.write(out_path);
    for (const auto& c : report.checks)
      std::cout << (c.passed ? "pass  " : "FAIL  ") << c.name << "  " << c.detail << "\n";
    for (const auto& e : report.errors) std::cout << "error " << e << "\n";
    std::cout << "wrote " << out_path << "\n";
    return report.exit_code(assert_mode);
  } catch (const gaugelab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}
