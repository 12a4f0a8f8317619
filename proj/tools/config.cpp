#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#define TOML_HEADER_ONLY 1
#include "toml.hpp"

namespace aklab::cli {

namespace {

using json = nlohmann::json;

const std::set<std::string> module_names{"scalarfuncs", "pointmodel", "fields", "wang", "titeica"};

double get_number(const std::string& key, const json& v) {
    if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
    return v.get<double>();
}

int get_int(const std::string& key, const json& v) {
    if (!v.is_number_integer()) throw ConfigError("config key '" + key + "' must be an integer");
    return v.get<int>();
}

bool get_bool(const std::string& key, const json& v) {
    if (!v.is_boolean()) throw ConfigError("config key '" + key + "' must be a boolean");
    return v.get<bool>();
}

std::string get_string(const std::string& key, const json& v) {
    if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string");
    return v.get<std::string>();
}

void apply_module(ExperimentConfig& cfg, const std::string& module, const std::string& key, const json& v) {
    auto unknown = [&] { throw ConfigError("unknown config key '" + key + "' for " + module); };
    if (module == "scalarfuncs") {
        auto& m = cfg.scalarfuncs;
        if (key == "c") {
            if (v.is_array()) {
                m.c_values.clear();
                for (const auto& x : v) m.c_values.push_back(get_number(key, x));
            } else {
                m.c_values = {get_number(key, v)};
            }
        } else if (key == "samples") {
            m.samples = get_int(key, v);
        } else if (key == "t_max") {
            m.t_max = get_number(key, v);
        } else {
            unknown();
        }
    } else if (module == "pointmodel") {
        auto& m = cfg.pointmodel;
        if (key == "c") m.c = get_number(key, v);
        else if (key == "samples") m.samples = get_int(key, v);
        else if (key == "symbol_samples") m.symbol_samples = get_int(key, v);
        else if (key == "w_max") m.w_max = get_number(key, v);
        else unknown();
    } else if (module == "fields") {
        auto& m = cfg.fields;
        if (key == "n") m.n = get_int(key, v);
        else if (key == "scenario") m.scenario = get_string(key, v);
        else if (key == "eps") m.eps = get_number(key, v);
        else if (key == "w_re") m.w.real(get_number(key, v));
        else if (key == "w_im") m.w.imag(get_number(key, v));
        else if (key == "c") m.c = get_number(key, v);
        else if (key == "fd_eps") m.fd_eps = get_number(key, v);
        else if (key == "wp_pairs") m.wp_pairs = get_int(key, v);
        else if (key == "export_fields") m.export_fields = get_bool(key, v);
        else unknown();
    } else if (module == "wang") {
        auto& m = cfg.wang;
        if (key == "n") m.n = get_int(key, v);
        else if (key == "phi") m.phi = get_string(key, v);
        else if (key == "tol") m.tol = get_number(key, v);
        else if (key == "max_iters") m.max_iters = get_int(key, v);
        else if (key == "k0") m.k0 = get_number(key, v);
        else if (key == "cubic_rescale_half") m.cubic_rescale_half = get_bool(key, v);
        else unknown();
    } else if (module == "titeica") {
        auto& m = cfg.titeica;
        if (key == "q_re") m.Q.real(get_number(key, v));
        else if (key == "q_im") m.Q.imag(get_number(key, v));
        else if (key == "extent") m.extent = get_number(key, v);
        else if (key == "step") m.step = get_number(key, v);
        else if (key == "rk_step") m.rk_step = get_number(key, v);
        else if (key == "frame_samples") m.frame_samples = get_int(key, v);
        else unknown();
    } else {
        throw ConfigError("unknown module '" + module + "'");
    }
}

bool apply_global(ExperimentConfig& cfg, const std::string& key, const json& v) {
    if (key == "seed") {
        if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError("config key 'seed' must be a non-negative integer");
        cfg.seed = v.get<std::uint64_t>();
    } else if (key == "tol_scale") {
        cfg.tol_scale = get_number(key, v);
    } else if (key == "out") {
        cfg.out = get_string(key, v);
    } else if (key == "tolerances") {
        if (!v.is_object()) throw ConfigError("config key 'tolerances' must be a table of check name = tolerance");
        for (const auto& [name, tol] : v.items()) cfg.tolerance_overrides[name] = get_number("tolerances." + name, tol);
    } else {
        return false;
    }
    return true;
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

}  // namespace

nlohmann::json load_config_file(const std::filesystem::path& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw ConfigError("cannot open config file " + file.string());
    std::stringstream buf;
    buf << is.rdbuf();
    std::string ext = file.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (ext == ".json") {
        try {
            return json::parse(buf.str());
        } catch (const json::parse_error& e) {
            throw ConfigError("invalid JSON in " + file.string() + ": " + e.what());
        }
    }
    if (ext == ".toml") {
        try {
            toml::table tbl = toml::parse(buf.str(), file.string());
            std::stringstream js;
            js << toml::json_formatter{tbl};
            return json::parse(js.str());
        } catch (const toml::parse_error& e) {
            throw ConfigError("invalid TOML in " + file.string() + ": " + std::string(e.description()));
        }
    }
    throw ConfigError("config file must end in .toml or .json: " + file.string());
}

void apply_config(ExperimentConfig& cfg, const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config root must be a table");
    for (const auto& [key, v] : j.items()) {
        if (apply_global(cfg, key, v)) continue;
        if (module_names.count(key)) {
            if (!v.is_object()) throw ConfigError("config key '" + key + "' must be a table");
            for (const auto& [k2, v2] : v.items()) apply_module(cfg, key, k2, v2);
            continue;
        }
        if (cfg.subcommand.empty() || cfg.subcommand == "all")
            throw ConfigError("config key '" + key + "' must sit inside a module table when running 'all'");
        apply_module(cfg, cfg.subcommand, key, v);
    }
}

void validate(const ExperimentConfig& cfg) {
    require(cfg.tol_scale > 0.0 && std::isfinite(cfg.tol_scale), "tol-scale must be a positive number");
    for (const auto& [name, tol] : cfg.tolerance_overrides)
        require(tol > 0.0, "tolerance override for '" + name + "' must be positive");
    const auto& s = cfg.scalarfuncs;
    require(!s.c_values.empty(), "scalarfuncs.c must list at least one value");
    for (double c : s.c_values) require(c < 0.0, "scalarfuncs.c values must be negative");
    require(s.samples >= 10, "scalarfuncs.samples must be at least 10");
    require(s.t_max > 0.0, "scalarfuncs.t_max must be positive");
    const auto& p = cfg.pointmodel;
    require(p.c < 0.0, "pointmodel.c must be negative");
    require(p.samples >= 1 && p.symbol_samples >= 1, "pointmodel sample counts must be positive");
    require(p.w_max > 0.0, "pointmodel.w_max must be positive");
    const auto& f = cfg.fields;
    require(f.n >= 16 && f.n % 2 == 0, "fields.n must be even and at least 16");
    require(f.scenario == "titeica" || f.scenario == "patch-holomorphic" || f.scenario == "random-smooth",
            "fields.scenario must be titeica, patch-holomorphic or random-smooth");
    require(f.c < 0.0, "fields.c must be negative");
    require(f.eps >= 0.0 && f.eps < 0.1, "fields.eps must lie in [0, 0.1) so the warp stays a diffeomorphism");
    require(f.fd_eps > 0.0, "fields.fd_eps must be positive");
    require(f.wp_pairs >= 1, "fields.wp_pairs must be positive");
    const auto& w = cfg.wang;
    require(w.n >= 8 && w.n % 2 == 0, "wang.n must be even and at least 8");
    require(w.phi == "zero" || w.phi == "constant" || w.phi == "smooth" || w.phi == "titeica" ||
                w.phi == "manufactured",
            "wang.phi must be zero, constant, smooth, titeica or manufactured");
    require(w.tol > 0.0, "wang.tol must be positive");
    require(w.max_iters >= 1, "wang.max_iters must be positive");
    require(w.k0 <= 0.0, "wang.k0 must be non-positive");
    const auto& t = cfg.titeica;
    require(t.Q != 0.0, "titeica: Q must be nonzero");
    require(t.extent > 0.0 && t.step > 0.0 && t.extent / t.step >= 3.0,
            "titeica: extent and step must be positive with at least three steps per half-side");
    require(t.rk_step > 0.0 && t.rk_step <= 1.0 / 256.0, "titeica.rk_step must be positive and at most 1/256");
    require(t.frame_samples >= 1, "titeica.frame_samples must be positive");
}

nlohmann::ordered_json to_json(const ExperimentConfig& cfg, const std::string& module) {
    nlohmann::ordered_json j;
    j["seed"] = cfg.seed;
    j["tol_scale"] = cfg.tol_scale;
    if (module == "scalarfuncs") {
        j["c"] = cfg.scalarfuncs.c_values;
        j["samples"] = cfg.scalarfuncs.samples;
        j["t_max"] = cfg.scalarfuncs.t_max;
    } else if (module == "pointmodel") {
        j["c"] = cfg.pointmodel.c;
        j["samples"] = cfg.pointmodel.samples;
        j["symbol_samples"] = cfg.pointmodel.symbol_samples;
        j["w_max"] = cfg.pointmodel.w_max;
    } else if (module == "fields") {
        const auto& f = cfg.fields;
        j["n"] = f.n;
        j["scenario"] = f.scenario;
        j["eps"] = f.eps;
        j["w_re"] = f.w.real();
        j["w_im"] = f.w.imag();
        j["c"] = f.c;
        j["fd_eps"] = f.fd_eps;
        j["wp_pairs"] = f.wp_pairs;
        j["export_fields"] = f.export_fields;
    } else if (module == "wang") {
        const auto& w = cfg.wang;
        j["n"] = w.n;
        j["phi"] = w.phi;
        j["tol"] = w.tol;
        j["max_iters"] = w.max_iters;
        j["k0"] = w.k0;
        j["cubic_rescale_half"] = w.cubic_rescale_half;
    } else if (module == "titeica") {
        const auto& t = cfg.titeica;
        j["q_re"] = t.Q.real();
        j["q_im"] = t.Q.imag();
        j["extent"] = t.extent;
        j["step"] = t.step;
        j["rk_step"] = t.rk_step;
        j["frame_samples"] = t.frame_samples;
    }
    if (!cfg.tolerance_overrides.empty()) j["tolerances"] = cfg.tolerance_overrides;
    return j;
}

}  // namespace aklab::cli
