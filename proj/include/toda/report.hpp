#pragma once

#include <limits>
#include <string>
#include <vector>

namespace toda {

enum class Verdict { Pass, Fail, Info };

struct Check {
    std::string metric;
    double eps = std::numeric_limits<double>::quiet_NaN();  // NaN when not tied to an eps value
    double value = 0.0;
    double tolerance = std::numeric_limits<double>::quiet_NaN();
    std::string relation;  // "<=", ">=", "==", "!=" or "" for information rows
    Verdict verdict = Verdict::Info;
};

Check check_le(std::string metric, double eps, double value, double bound);
Check check_ge(std::string metric, double eps, double value, double bound);
Check check_eq(std::string metric, double eps, double value, double expected);
Check check_ne(std::string metric, double eps, double value, double excluded);
Check check_true(std::string metric, double eps, bool ok);
Check info(std::string metric, double eps, double value);

struct Report {
    std::string preset;
    std::string config_hash;
    std::vector<Check> checks;

    void add(Check c) { checks.push_back(std::move(c)); }
    void append(const Report& other);
    bool passed() const;
    std::vector<std::string> failures() const;
    // Columns: config_hash, eps, metric, value, tolerance, verdict.
    std::string csv() const;
    std::string json() const;
};

// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace toda
