#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace aklab::cli {

using json = nlohmann::ordered_json;

struct Check {
    std::string name;
    int criterion = 0;  // acceptance criterion number, 0 for module-level checks
    double value = 0.0;
    double tol = 0.0;
    std::string relation;  // "<=", ">=", "<", ">", "=="
    bool pass = false;
    std::string note;
};

// A quoted statement that was tested and found not to hold, kept out of pass/fail gating.
struct Finding {
    std::string name;
    std::string claim;
    double measured = 0.0;
    std::string status;  // "refuted" or "confirmed"
    std::string note;
};

struct Skip {
    std::string name;
    std::string reason;
};

class Report {
public:
    Report(std::string module, double tol_scale, std::map<std::string, double> overrides = {});

    // value <= tol * tol_scale
    bool le(const std::string& name, int criterion, double value, double tol, const std::string& note = "");
    // value >= tol / tol_scale
    bool ge(const std::string& name, int criterion, double value, double tol, const std::string& note = "");
    // strict comparisons against a fixed bound, not scaled
    bool lt(const std::string& name, int criterion, double value, double bound, const std::string& note = "");
    bool gt(const std::string& name, int criterion, double value, double bound, const std::string& note = "");
    bool truth(const std::string& name, int criterion, bool ok, const std::string& note = "");
    void finding(const std::string& name, const std::string& claim, double measured, bool holds,
                 const std::string& note = "");
    void skip(const std::string& name, const std::string& reason);

    json& metrics() { return metrics_; }
    void add_timing(const std::string& section, int criterion, double seconds);

    bool all_pass() const;
    const std::string& module() const { return module_; }
    const std::vector<Check>& checks() const { return checks_; }
    const std::vector<Finding>& findings() const { return findings_; }
    const std::vector<Skip>& skips() const { return skips_; }

    struct Timing {
        std::string section;
        int criterion;
        double seconds;
    };
    const std::vector<Timing>& timings() const { return timings_; }

    json summary_json() const;
    json timings_json() const;

private:
    double tol_for(const std::string& name, double tol) const;
    bool add(Check c);

    std::string module_;
    double tol_scale_;
    std::map<std::string, double> overrides_;
    std::vector<Check> checks_;
    std::vector<Finding> findings_;
    std::vector<Skip> skips_;
    std::vector<Timing> timings_;
    json metrics_ = json::object();
};

// Records the wall-clock time of a scope into a report.
class ScopedTimer {
public:
    ScopedTimer(Report& r, std::string section, int criterion);
    ~ScopedTimer();
    ScopedTimer(const ScopedTimer&) = delete;
    ScopedTimer& operator=(const ScopedTimer&) = delete;

private:
    Report& r_;
    std::string section_;
    int criterion_;
    std::chrono::steady_clock::time_point start_;
};

// Output sink; an empty directory disables file output.
class OutputDir {
public:
    explicit OutputDir(std::filesystem::path dir = {});
    bool enabled() const { return !dir_.empty(); }
    const std::filesystem::path& path() const { return dir_; }
    OutputDir sub(const std::string& name) const;
    void write_text(const std::string& file, const std::string& text) const;
    void write_json(const std::string& file, const json& j) const;

private:
    std::filesystem::path dir_;
};

// Fixed-format numbers so that CSV output is reproducible byte for byte.
std::string fmt_num(double v);

class CsvWriter {
public:
    explicit CsvWriter(const std::vector<std::string>& header);
    void row(const std::vector<double>& values);
    const std::string& text() const { return text_; }

private:
    std::size_t cols_;
    std::string text_;
};

}  // namespace aklab::cli
