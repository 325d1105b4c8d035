#pragma once

// Config-driven experiment runner behind the bergman-zeros command line.
//
// A config is a JSON object with an "experiment" key naming one of the kinds listed by
// list_experiments() and the keys that kind accepts; anything else is rejected.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bergman/errors.hpp"
#include "bergman/statistics.hpp"

namespace bergman {

/// Schema or syntax problem in a config; line is 0 when unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0, int column = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what : what),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

struct ExperimentInfo {
  std::string kind;
  std::vector<std::string> parameters;  // accepted keys besides the common ones
  std::string anchor;                   // where the law being checked is stated
  std::string summary;
};

const std::vector<ExperimentInfo>& list_experiments();
std::string list_experiments_text();
std::string list_experiments_json();

struct ExperimentConfig {
  std::string kind;
  nlohmann::json params;  // validated, kind-specific
  std::uint64_t seed = 0;
  int threads = 0;
  std::string output = ".";
  std::string source;     // raw text, hashed into config_digest
};

/// Parses and validates; throws ConfigError naming the offending key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

StatsReport run_experiment(const ExperimentConfig& config);

/// results.csv text (fixed header, %.17g numbers, empty field for a missing prediction).
std::string results_csv(const StatsReport& report);
/// summary.json text.
std::string summary_json(const ExperimentConfig& config, const StatsReport& report);
/// 64-bit FNV-1a of the config text, as 16 hex digits.
std::string config_digest(const std::string& text);

struct RunRequest {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
  bool check = false;
};

/// Runs a config end to end and writes results.csv and summary.json.
/// Exit code: 0 success, 1 error, 2 failed check under --check.
int run_command(const RunRequest& request, std::ostream& out, std::ostream& err);

}  // namespace bergman
