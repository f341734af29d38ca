#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sie_cli/config.hpp"
#include "sie_cli/output.hpp"

namespace sie::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitError = 1,
    kExitConfig = 2,
    kExitCheckFail = 3,
    kExitUnavailable = 4,
    kExitNotConverged = 5,
    kExitNumericFailure = 6,
};

/// Command-line overrides applied on top of the config file.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<unsigned> threads;
};

void apply(ExperimentConfig& config, const Overrides& overrides);

/// Condition reports requested by [checks]; min_radius is included for SIE
/// problems.
struct CheckOutcome {
    std::vector<ConditionReport> reports;
    std::optional<RadiusSearch> min_radius;
};

CheckOutcome run_checks(const ExperimentConfig& config, bool require_radius);

/// 3 if any verdict fails, else 4 if any is unavailable, else 0.
int exit_code_for(const std::vector<ConditionReport>& reports);

int cmd_check(const ExperimentConfig& config, RunDirectory& dir, std::ostream& log);
int cmd_solve(const ExperimentConfig& config, RunDirectory& dir, std::ostream& log);
int cmd_gbm(const ExperimentConfig& config, RunDirectory& dir, std::ostream& log);
int cmd_fredholm(const ExperimentConfig& config, RunDirectory& dir, std::ostream& log);
int cmd_isometry(const ExperimentConfig& config, RunDirectory& dir, std::ostream& log);

/// Least-squares slope of log2(error) against log2(dt).
double log2_slope(const std::vector<double>& dt, const std::vector<double>& error);

/// Full driver: parses argv, runs one subcommand, writes the manifest.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace sie::cli
