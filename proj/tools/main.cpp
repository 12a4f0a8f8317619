#include <algorithm>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace aklab::cli;

namespace {

template <class T>
void set_if(const std::optional<T>& v, T& dst) {
    if (v) dst = *v;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (!args.empty() && args.front() == "run") args.erase(args.begin());
    std::reverse(args.begin(), args.end());

    CLI::App app{"Numerical checks for the pseudo-Kaehler geometry of convex projective structures"};
    app.name("aklab");
    app.require_subcommand(1, 1);
    app.fallthrough();

    std::optional<std::uint64_t> seed;
    std::optional<std::string> out, config;
    std::optional<double> tol_scale;
    app.add_option("--seed", seed, "random seed (default 7)");
    app.add_option("--out", out, "output directory (default aklab_out, empty disables files)");
    app.add_option("--tol-scale", tol_scale, "multiplies upper tolerances and divides lower bounds")
        ->check(CLI::PositiveNumber);
    app.add_option("--config", config, "TOML or JSON config file")->check(CLI::ExistingFile);

    std::vector<double> sf_c;
    std::optional<double> sf_tmax;
    std::optional<int> sf_samples;
    auto* sf = app.add_subcommand("scalarfuncs", "conformal profile F, weight f and lemma identities");
    sf->add_option("--c", sf_c, "negative constant c (repeatable)");
    sf->add_option("--t-max", sf_tmax, "upper end of the log-spaced t sweep");
    sf->add_option("--samples", sf_samples, "number of t samples, t = 0 included");

    std::optional<int> pm_samples;
    std::optional<double> pm_c;
    std::optional<std::string> pm_report;
    auto* pm = app.add_subcommand("pointmodel", "pseudo-Kaehler point model, moment maps and symbol");
    pm->add_option("--samples", pm_samples, "random points");
    pm->add_option("--c", pm_c, "negative constant c");
    pm->add_option("--report", pm_report, "extra copy of the JSON summary");

    std::optional<int> fd_n;
    std::optional<std::string> fd_scenario;
    auto* fd = app.add_subcommand("fields", "torus field operators, moment map and W-system");
    fd->add_option("--n", fd_n, "grid size");
    fd->add_option("--scenario", fd_scenario, "titeica, patch-holomorphic or random-smooth");

    std::optional<int> wg_n;
    std::optional<std::string> wg_phi;
    std::optional<double> wg_tol, wg_k0;
    auto* wg = app.add_subcommand("wang", "Newton solver for the Wang equation on the torus");
    wg->add_option("--n", wg_n, "grid size");
    wg->add_option("--phi", wg_phi, "zero, constant, smooth, titeica or manufactured");
    wg->add_option("--tol", wg_tol, "Newton tolerance (max residual)");
    wg->add_option("--k0", wg_k0, "background curvature, non-positive");

    std::optional<double> tt_qre, tt_qim, tt_extent, tt_step;
    auto* tt = app.add_subcommand("titeica", "affine sphere frame integration and Titeica immersion");
    tt->add_option("--q-re", tt_qre, "real part of Q");
    tt->add_option("--q-im", tt_qim, "imaginary part of Q");
    tt->add_option("--extent", tt_extent, "half-width of the sampled square");
    tt->add_option("--step", tt_step, "mesh spacing");

    app.add_subcommand("all", "every module, one output directory each");

    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    ExperimentConfig cfg;
    cfg.subcommand = app.get_subcommands().front()->get_name();
    try {
        if (config) apply_config(cfg, load_config_file(*config));
        set_if(seed, cfg.seed);
        if (out) cfg.out = *out;
        set_if(tol_scale, cfg.tol_scale);
        if (!sf_c.empty()) cfg.scalarfuncs.c_values = sf_c;
        set_if(sf_tmax, cfg.scalarfuncs.t_max);
        set_if(sf_samples, cfg.scalarfuncs.samples);
        set_if(pm_samples, cfg.pointmodel.samples);
        set_if(pm_c, cfg.pointmodel.c);
        set_if(fd_n, cfg.fields.n);
        set_if(fd_scenario, cfg.fields.scenario);
        set_if(wg_n, cfg.wang.n);
        set_if(wg_phi, cfg.wang.phi);
        set_if(wg_tol, cfg.wang.tol);
        set_if(wg_k0, cfg.wang.k0);
        if (tt_qre) cfg.titeica.Q.real(*tt_qre);
        if (tt_qim) cfg.titeica.Q.imag(*tt_qim);
        set_if(tt_extent, cfg.titeica.extent);
        set_if(tt_step, cfg.titeica.step);
        validate(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "aklab: " << e.what() << "\n";
        return exit_usage;
    }

    try {
        return run_experiment(cfg, std::cout, pm_report ? std::filesystem::path(*pm_report) : std::filesystem::path());
    } catch (const std::exception& e) {
        std::cerr << "aklab: " << e.what() << "\n";
        return exit_module_error;
    }
}
