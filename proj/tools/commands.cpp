#include "commands.hpp"

#include <chrono>
#include <fstream>
#include <ostream>

#include "aklab/parallel.hpp"
#include "suites.hpp"

namespace aklab::cli {

const std::vector<std::string>& module_list() {
    static const std::vector<std::string> m{"scalarfuncs", "pointmodel", "fields", "wang", "titeica"};
    return m;
}

namespace {

Report dispatch(const std::string& module, const ExperimentConfig& cfg, const OutputDir& dir) {
    if (module == "scalarfuncs") return run_scalarfuncs_suite(cfg, dir);
    if (module == "pointmodel") return run_pointmodel_suite(cfg, dir);
    if (module == "fields") return run_fields_suite(cfg, dir);
    if (module == "wang") return run_wang_suite(cfg, dir);
    if (module == "titeica") return run_titeica_suite(cfg, dir);
    throw ConfigError("unknown subcommand '" + module + "'");
}

json module_summary(const ModuleOutcome& o, const ExperimentConfig& cfg) {
    json j;
    j["module"] = o.module;
    j["config"] = to_json(cfg, o.module);
    if (o.report) {
        json s = o.report->summary_json();
        for (auto it = s.begin(); it != s.end(); ++it)
            if (it.key() != "module") j[it.key()] = it.value();
    } else {
        j["pass"] = false;
        j["error"] = o.error;
    }
    return j;
}

json module_timings(const ModuleOutcome& o) {
    json j = o.report ? o.report->timings_json() : json{{"module", o.module}};
    j["wall_seconds"] = o.seconds;
    j["threads"] = thread_count();
    return j;
}

void print_outcome(const ModuleOutcome& o, std::ostream& log) {
    if (!o.report) {
        log << o.module << ": ERROR " << o.error << "\n";
        return;
    }
    const auto& r = *o.report;
    std::size_t failed = 0;
    for (const auto& c : r.checks()) failed += c.pass ? 0 : 1;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f s", o.seconds);
    log << o.module << ": " << (failed ? "FAIL" : "pass") << " (" << r.checks().size() - failed << "/"
        << r.checks().size() << " checks, " << r.findings().size() << " findings, " << buf << ")\n";
    for (const auto& c : r.checks())
        if (!c.pass)
            log << "  failed " << c.name << ": " << fmt_num(c.value) << " " << c.relation << " " << fmt_num(c.tol)
                << " does not hold\n";
    for (const auto& f : r.findings())
        log << "  finding " << f.name << " (" << f.status << "): measured " << fmt_num(f.measured) << "\n";
}

}  // namespace

ModuleOutcome run_module(const std::string& module, const ExperimentConfig& cfg, const OutputDir& dir) {
    ModuleOutcome o;
    o.module = module;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        o.report.emplace(dispatch(module, cfg, dir));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        o.error = e.what();
    }
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    dir.write_json("summary.json", module_summary(o, cfg));
    dir.write_json("timings.json", module_timings(o));
    return o;
}

int run_experiment(const ExperimentConfig& cfg, std::ostream& log, const std::filesystem::path& extra_report) {
    const OutputDir root(cfg.out);
    std::vector<ModuleOutcome> outcomes;
    if (cfg.subcommand == "all") {
        for (const auto& m : module_list()) {
            outcomes.push_back(run_module(m, cfg, root.sub(m)));
            print_outcome(outcomes.back(), log);
        }
    } else {
        outcomes.push_back(run_module(cfg.subcommand, cfg, root));
        print_outcome(outcomes.back(), log);
    }

    bool errors = false, failures = false;
    for (const auto& o : outcomes) {
        if (!o.report) errors = true;
        else if (!o.report->all_pass()) failures = true;
    }

    if (cfg.subcommand == "all") {
        json s, t;
        s["seed"] = cfg.seed;
        s["tol_scale"] = cfg.tol_scale;
        s["pass"] = !errors && !failures;
        json mods = json::object(), tm = json::object();
        double total = 0.0;
        for (const auto& o : outcomes) {
            json e;
            e["pass"] = o.report ? o.report->all_pass() : false;
            if (o.report) {
                std::size_t failed = 0;
                for (const auto& c : o.report->checks()) failed += c.pass ? 0 : 1;
                e["checks_total"] = o.report->checks().size();
                e["checks_failed"] = failed;
                e["findings"] = o.report->findings().size();
            } else {
                e["error"] = o.error;
            }
            mods[o.module] = std::move(e);
            tm[o.module] = o.seconds;
            total += o.seconds;
        }
        s["modules"] = std::move(mods);
        t["modules"] = std::move(tm);
        t["total_seconds"] = total;
        t["threads"] = thread_count();
        root.write_json("summary.json", s);
        root.write_json("timings.json", t);
    }

    if (!extra_report.empty() && outcomes.size() == 1) {
        std::ofstream os(extra_report, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + extra_report.string());
        os << module_summary(outcomes.front(), cfg).dump(2) << "\n";
    }

    if (errors) return exit_module_error;
    return failures ? exit_check_failed : exit_ok;
}

}  // namespace aklab::cli
