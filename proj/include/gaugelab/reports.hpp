#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace gaugelab {

inline constexpr const char* kVersion = "0.1.0";

// Sections of key = value pairs, one section per experiment.
class Config {
 public:
  static Config parse(std::istream& in);
  static Config parse(const std::string& text);
  static Config load(const std::filesystem::path& path);

  void set(const std::string& section, const std::string& key, const std::string& value);
  bool has(const std::string& section, const std::string& key) const;
  const std::map<std::string, std::map<std::string, std::string>>& sections() const { return sections_; }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

struct KeySpec {
  std::string key;
  std::string default_value;
  std::string doc;
};

const std::vector<std::string>& experiment_names();
const std::vector<KeySpec>& experiment_keys(const std::string& experiment);

// Rejects unknown sections and unknown keys.
void validate(const Config& config);

// Defaults overlaid with one section of the config; typed access throws ConfigError.
class Settings {
 public:
  Settings(const Config& config, const std::string& experiment);

  const std::string& experiment() const { return experiment_; }
  std::string text(const std::string& key) const;
  double number(const std::string& key) const;
  long long integer(const std::string& key) const;
  std::uint64_t seed() const;
  bool flag(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;  // comma separated
  std::vector<std::string> words(const std::string& key) const;
  bool is_set(const std::string& key) const { return !text(key).empty(); }

  // key=value lines in key order; the input of the config hash
  std::string canonical() const;
  std::uint64_t hash() const;

 private:
  std::string experiment_;
  std::map<std::string, std::string> values_;
};

std::uint64_t fnv1a(std::string_view data);

// Shortest decimal that reads back to the same double.
std::string format_number(double value);

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ScanReport {
  std::string experiment;
  std::string field;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  nlohmann::json provenance;
  std::vector<Check> checks;        // configured assertions
  std::vector<std::string> errors;  // flagged rows and solver failures

  void add_row(std::vector<std::string> row);
  void check(const std::string& name, bool passed, const std::string& detail = {});

  std::string header_line() const;  // '#' followed by one line of JSON
  std::string body() const;         // column line and rows, byte-identical across runs
  void write(const std::filesystem::path& path) const;

  bool checks_passed() const;
  // 0 iff no errors and, in assert mode, every check passed
  int exit_code(bool assert_mode) const;
};

ScanReport run_curvature_scan(const Config& config);
ScanReport run_weyl_scan(const Config& config);
ScanReport run_spectrum(const Config& config);
ScanReport run_tail_scan(const Config& config);
ScanReport run_gauge_fix(const Config& config);
ScanReport run_kato_check(const Config& config);

ScanReport run_experiment(const std::string& name, const Config& config);

}  // namespace gaugelab
