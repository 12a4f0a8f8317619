#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace aklab::cli {

Report::Report(std::string module, double tol_scale, std::map<std::string, double> overrides)
    : module_(std::move(module)), tol_scale_(tol_scale), overrides_(std::move(overrides)) {
    if (!(tol_scale > 0.0)) throw std::invalid_argument("tol-scale must be positive");
}

double Report::tol_for(const std::string& name, double tol) const {
    auto it = overrides_.find(name);
    return it != overrides_.end() ? it->second : tol;
}

bool Report::add(Check c) {
    bool ok = c.pass;
    checks_.push_back(std::move(c));
    return ok;
}

bool Report::le(const std::string& name, int criterion, double value, double tol, const std::string& note) {
    double t = tol_for(name, tol) * tol_scale_;
    return add({name, criterion, value, t, "<=", std::isfinite(value) && value <= t, note});
}

bool Report::ge(const std::string& name, int criterion, double value, double tol, const std::string& note) {
    double t = tol_for(name, tol) / tol_scale_;
    return add({name, criterion, value, t, ">=", std::isfinite(value) && value >= t, note});
}

bool Report::lt(const std::string& name, int criterion, double value, double bound, const std::string& note) {
    return add({name, criterion, value, bound, "<", value < bound, note});
}

bool Report::gt(const std::string& name, int criterion, double value, double bound, const std::string& note) {
    return add({name, criterion, value, bound, ">", value > bound, note});
}

bool Report::truth(const std::string& name, int criterion, bool ok, const std::string& note) {
    return add({name, criterion, ok ? 1.0 : 0.0, 1.0, "==", ok, note});
}

void Report::finding(const std::string& name, const std::string& claim, double measured, bool holds,
                     const std::string& note) {
    findings_.push_back({name, claim, measured, holds ? "confirmed" : "refuted", note});
}

void Report::skip(const std::string& name, const std::string& reason) { skips_.push_back({name, reason}); }

void Report::add_timing(const std::string& section, int criterion, double seconds) {
    timings_.push_back({section, criterion, seconds});
}

bool Report::all_pass() const {
    for (const auto& c : checks_)
        if (!c.pass) return false;
    return true;
}

json Report::summary_json() const {
    json j;
    j["module"] = module_;
    j["tol_scale"] = tol_scale_;
    j["pass"] = all_pass();
    int failed = 0;
    json checks = json::array();
    for (const auto& c : checks_) {
        json e;
        e["name"] = c.name;
        e["criterion"] = c.criterion;
        e["value"] = c.value;
        e["relation"] = c.relation;
        e["tol"] = c.tol;
        e["pass"] = c.pass;
        if (!c.note.empty()) e["note"] = c.note;
        checks.push_back(std::move(e));
        if (!c.pass) ++failed;
    }
    j["checks_total"] = checks_.size();
    j["checks_failed"] = failed;
    j["checks"] = std::move(checks);
    json f = json::array();
    for (const auto& x : findings_)
        f.push_back({{"name", x.name}, {"claim", x.claim}, {"measured", x.measured}, {"status", x.status},
                     {"note", x.note}});
    j["findings"] = std::move(f);
    json s = json::array();
    for (const auto& x : skips_) s.push_back({{"name", x.name}, {"reason", x.reason}});
    j["skipped"] = std::move(s);
    j["metrics"] = metrics_;
    return j;
}

json Report::timings_json() const {
    json j;
    j["module"] = module_;
    json arr = json::array();
    double total = 0.0;
    for (const auto& t : timings_) {
        arr.push_back({{"section", t.section}, {"criterion", t.criterion}, {"seconds", t.seconds}});
        total += t.seconds;
    }
    j["sections"] = std::move(arr);
    j["total_seconds"] = total;
    return j;
}

ScopedTimer::ScopedTimer(Report& r, std::string section, int criterion)
    : r_(r), section_(std::move(section)), criterion_(criterion), start_(std::chrono::steady_clock::now()) {}

ScopedTimer::~ScopedTimer() {
    std::chrono::duration<double> d = std::chrono::steady_clock::now() - start_;
    r_.add_timing(section_, criterion_, d.count());
}

OutputDir::OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
}

OutputDir OutputDir::sub(const std::string& name) const {
    if (!enabled()) return OutputDir();
    return OutputDir(dir_ / name);
}

void OutputDir::write_text(const std::string& file, const std::string& text) const {
    if (!enabled()) return;
    std::ofstream os(dir_ / file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (dir_ / file).string());
    os << text;
}

void OutputDir::write_json(const std::string& file, const json& j) const { write_text(file, j.dump(2) + "\n"); }

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::vector<std::string>& header) : cols_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
    text_ += "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != cols_) throw std::logic_error("CsvWriter: column count mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) text_ += (i ? "," : "") + fmt_num(values[i]);
    text_ += "\n";
}

}  // namespace aklab::cli
