#pragma once

// Config-driven experiment runner: named verification suites, Monte Carlo
// experiments and versioned JSON/CSV reports.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dtlab/check.hpp"
#include "dtlab/ensembles.hpp"

namespace dtlab::cli {

inline constexpr const char* kSchemaVersion = "1.0.0";
inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kPass = 0, kCheckFailure = 1, kUsageError = 2, kPrecisionError = 3 };

struct RunConfig {
  std::string command;
  std::map<std::string, std::string> params;
};

struct RunReport {
  std::string command;
  /// Every effective parameter, defaults included, so the echo alone
  /// reproduces the run.
  std::map<std::string, std::string> config;
  CheckList records;
  std::vector<ensembles::MomentEstimate> estimates;
  std::vector<std::string> exact_values;  // per estimate, "" when no oracle applies
  double wall_clock_seconds = 0.0;

  bool passed() const { return all_pass(records); }
};

/// Suite names accepted by `verify`, in report order; "all" runs each.
const std::vector<std::string>& suite_manifest();
const std::vector<std::string>& commands();

/// "key = value" lines; '#' starts a comment, [section] lines are ignored,
/// surrounding quotes on values are stripped. A `command` key is allowed.
RunConfig parse_config_text(std::string_view text);
/// A key-value file, or a JSON report whose config echo is reused.
RunConfig load_config_file(const std::string& path);
/// Throws std::runtime_error when the schema major version is not ours.
RunConfig config_from_report_json(std::string_view json_text);
/// "key=value" override; throws std::invalid_argument when malformed.
void apply_override(RunConfig& cfg, std::string_view assignment);

/// Fills defaults and rejects unknown keys (std::invalid_argument).
std::map<std::string, std::string> resolve(const RunConfig& cfg);

RunReport run(const RunConfig& cfg);
RunReport run_verify(const RunConfig& cfg);
RunReport run_moments(const RunConfig& cfg);
RunReport run_fisher(const RunConfig& cfg);
RunReport run_dimension(const RunConfig& cfg);
RunReport run_spectra(const RunConfig& cfg);

std::string report_json(const RunReport& r);
/// name,expected,actual,tolerance,pass,provenance
std::string report_csv(const RunReport& r);
std::string estimates_csv(const RunReport& r);

int exit_code(const RunReport& r);

}  // namespace dtlab::cli
