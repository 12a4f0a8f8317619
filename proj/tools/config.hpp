#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace aklab::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ScalarfuncsConfig {
    std::vector<double> c_values{-0.5, -1.0, -2.0};
    int samples = 1000;
    double t_max = 1e4;
};

struct PointmodelConfig {
    double c = -1.0;
    int samples = 1000;
    int symbol_samples = 500;
    double w_max = 2.0;
};

struct FieldsConfig {
    int n = 64;
    std::string scenario = "patch-holomorphic";
    double eps = 0.05;
    std::complex<double> w{0.6, -0.3};
    double c = -1.0;
    double fd_eps = 1e-4;
    int wp_pairs = 20;
    bool export_fields = true;
};

struct WangConfig {
    int n = 64;
    std::string phi = "smooth";
    double tol = 1e-11;
    int max_iters = 50;
    double k0 = -1.0;
    bool cubic_rescale_half = true;
};

struct TiteicaConfig {
    std::complex<double> Q{1.0, 0.0};
    double extent = 1.0;
    double step = 1.0 / 32.0;
    double rk_step = 1.0 / 256.0;
    int frame_samples = 50;
};

struct ExperimentConfig {
    std::string subcommand;
    std::uint64_t seed = 7;
    std::filesystem::path out = "aklab_out";
    double tol_scale = 1.0;
    std::map<std::string, double> tolerance_overrides;
    ScalarfuncsConfig scalarfuncs;
    PointmodelConfig pointmodel;
    FieldsConfig fields;
    WangConfig wang;
    TiteicaConfig titeica;
};

// Reads a TOML or JSON file (chosen by extension) into JSON form.
nlohmann::json load_config_file(const std::filesystem::path& file);

// Applies a parsed config to cfg. Keys may sit at the top level or in a table named after a
// subcommand; unknown keys and wrongly typed values raise ConfigError.
void apply_config(ExperimentConfig& cfg, const nlohmann::json& j);

// Checks ranges of every module section.
void validate(const ExperimentConfig& cfg);

// Settings actually used, for the reports.
nlohmann::ordered_json to_json(const ExperimentConfig& cfg, const std::string& module);

}  // namespace aklab::cli
