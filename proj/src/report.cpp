#include "toda/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace toda {

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Info: return "info";
    }
    return "info";
}

Check make(std::string metric, double eps, double value, double tol, std::string rel, bool ok) {
    Check c;
    c.metric = std::move(metric);
    c.eps = eps;
    c.value = value;
    c.tolerance = tol;
    c.relation = std::move(rel);
    c.verdict = ok ? Verdict::Pass : Verdict::Fail;
    return c;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return out + "\"";
}

}  // namespace

Check check_le(std::string metric, double eps, double value, double bound) {
    return make(std::move(metric), eps, value, bound, "<=", value <= bound);
}
Check check_ge(std::string metric, double eps, double value, double bound) {
    return make(std::move(metric), eps, value, bound, ">=", value >= bound);
}
Check check_eq(std::string metric, double eps, double value, double expected) {
    return make(std::move(metric), eps, value, expected, "==", value == expected);
}
Check check_ne(std::string metric, double eps, double value, double excluded) {
    return make(std::move(metric), eps, value, excluded, "!=", value != excluded);
}
Check check_true(std::string metric, double eps, bool ok) {
    return make(std::move(metric), eps, ok ? 1.0 : 0.0, 1.0, "==", ok);
}
Check info(std::string metric, double eps, double value) {
    Check c;
    c.metric = std::move(metric);
    c.eps = eps;
    c.value = value;
    return c;
}

void Report::append(const Report& other) {
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

bool Report::passed() const {
    for (const auto& c : checks)
        if (c.verdict == Verdict::Fail) return false;
    return true;
}

std::vector<std::string> Report::failures() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
        if (c.verdict == Verdict::Fail) out.push_back(c.metric + (std::isnan(c.eps) ? "" : "@" + num(c.eps)));
    return out;
}

std::string Report::csv() const {
    std::string s = "config_hash,eps,metric,value,tolerance,verdict\n";
    for (const auto& c : checks)
        s += config_hash + "," + num(c.eps) + "," + csv_field(c.metric) + "," + num(c.value) + "," +
             (c.relation.empty() ? "" : c.relation + num(c.tolerance)) + "," + verdict_name(c.verdict) + "\n";
    return s;
}

std::string Report::json() const {
    nlohmann::ordered_json j;
    j["preset"] = preset;
    j["config_hash"] = config_hash;
    j["passed"] = passed();
    j["failures"] = failures();
    auto rows = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        nlohmann::ordered_json r;
        r["config_hash"] = config_hash;
        r["eps"] = std::isnan(c.eps) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(c.eps);
        r["metric"] = c.metric;
        r["value"] = std::isfinite(c.value) ? nlohmann::ordered_json(c.value) : nlohmann::ordered_json(num(c.value));
        r["relation"] = c.relation;
        r["tolerance"] = std::isnan(c.tolerance) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(c.tolerance);
        r["verdict"] = verdict_name(c.verdict);
        rows.push_back(r);
    }
    j["checks"] = rows;
    return j.dump(2) + "\n";
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("failed writing " + tmp.string());
    }
    fs::rename(tmp, target);
}

}  // namespace toda
