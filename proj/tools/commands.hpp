#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "report.hpp"

namespace aklab::cli {

enum ExitCode { exit_ok = 0, exit_check_failed = 1, exit_usage = 2, exit_module_error = 3 };

const std::vector<std::string>& module_list();

struct ModuleOutcome {
    std::string module;
    std::optional<Report> report;  // empty when the module threw
    std::string error;
    double seconds = 0.0;
};

// Runs one module and writes summary.json, timings.json and its data files into dir.
ModuleOutcome run_module(const std::string& module, const ExperimentConfig& cfg, const OutputDir& dir);

// Runs cfg.subcommand ("all" runs every module into out/<module>) and returns the exit code.
// A one-line status per module goes to log.
int run_experiment(const ExperimentConfig& cfg, std::ostream& log, const std::filesystem::path& extra_report = {});

}  // namespace aklab::cli
