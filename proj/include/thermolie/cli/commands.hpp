#pragma once

// Subcommands behind the `thermolie` executable. Each returns data so tests
// can drive them without a process boundary; run_cli maps exceptions to exit codes.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "thermolie/cli/config.hpp"

namespace thermolie::cli {

enum ExitCode : int { kExitOk = 0, kExitIo = 1, kExitValidation = 2, kExitSolver = 3, kExitCheckFailed = 4 };

/// Runs the configured method (or `method` when given). Throws StepFailure on solver errors.
Trajectory simulate(const RunConfig& config, std::optional<Method> method = std::nullopt);

nlohmann::json summary_json(const RunSummary& s);

struct CompareResult {
  Trajectory vi;
  Trajectory rk2;
  nlohmann::json summary;  // deterministic: no wall-clock fields
  bool all_completed() const { return !vi.failed_step && !rk2.failed_step; }
};

/// Runs vi and rk2 side by side on the same config and writes vi.csv, rk2.csv,
/// summary.json, energy.svg, entropy.svg and com_z.svg into out_dir.
/// A method that fails keeps the records it produced; see all_completed().
CompareResult compare(const RunConfig& config, const std::filesystem::path& out_dir);

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct CheckReport {
  std::vector<CheckResult> results;
  bool passed() const;
  nlohmann::json to_json() const;
};

/// Threshold of the discrete Kelvin-Noether check, independent of the configured
/// newton_tol so a loosened solver shows up as a failure.
inline constexpr double kCheckKnTolerance = 10.0 * 1e-12;

/// Algebra, RHS and trajectory property suites on the configured system.
CheckReport run_checks(const RunConfig& config, unsigned seed = 20240601u);

struct ConvergenceRow {
  std::string variant;  // "frictionless" or "full"
  std::string method;
  ConvergenceReport report;
};

/// Frictionless reduction and full system, vi and rk2 each.
std::vector<ConvergenceRow> run_convergence(const RunConfig& config, const std::vector<double>& h_list,
                                            double t_final, std::optional<double> h_ref = std::nullopt);

std::string format_convergence_table(const std::vector<ConvergenceRow>& rows);

/// Parses a comma-separated list of numbers or names. Throws ValidationError.
std::vector<double> parse_number_list(const std::string& text, const std::string& what);
std::vector<std::string> parse_name_list(const std::string& text, const std::string& what);

int run_cli(int argc, char** argv);

}  // namespace thermolie::cli
