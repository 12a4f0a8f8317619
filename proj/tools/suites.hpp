#pragma once

#include "config.hpp"
#include "report.hpp"

namespace aklab::cli {

// Each suite runs the checks of one module with the given settings, writes its bulk data
// (CSV, OBJ) to out, and returns the report. Summary and timing files are written by the caller.
Report run_scalarfuncs_suite(const ExperimentConfig& cfg, const OutputDir& out);
Report run_pointmodel_suite(const ExperimentConfig& cfg, const OutputDir& out);
Report run_fields_suite(const ExperimentConfig& cfg, const OutputDir& out);
Report run_wang_suite(const ExperimentConfig& cfg, const OutputDir& out);
Report run_titeica_suite(const ExperimentConfig& cfg, const OutputDir& out);

}  // namespace aklab::cli
