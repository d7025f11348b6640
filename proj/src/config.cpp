#include "toda/config.hpp"

#include <charconv>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace toda {

namespace {

std::string fmt(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string fmt_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double x = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size())
        throw std::invalid_argument("config: '" + key + "' expects a number, got '" + v + "'");
    return x;
}

int to_int(const std::string& key, const std::string& v) {
    int x = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size())
        throw std::invalid_argument("config: '" + key + "' expects an integer, got '" + v + "'");
    return x;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw std::invalid_argument("config: '" + key + "' expects true or false, got '" + v + "'");
}

std::string green_name(GreenMethod g) { return g == GreenMethod::Numeric ? "numeric" : "closed"; }

GreenMethod parse_green(const std::string& v) {
    if (v == "closed") return GreenMethod::ClosedForm;
    if (v == "numeric") return GreenMethod::Numeric;
    throw std::invalid_argument("config: green must be closed or numeric, got '" + v + "'");
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;
struct Key {
    std::string section, name;
    Getter get;
    Setter set;
};

#define TODA_NUM(sec, field)                                                                    \
    Key {                                                                                       \
        sec, #field, [](const ExperimentConfig& c) { return fmt(c.field); },                    \
            [](ExperimentConfig& c, const std::string& v) { c.field = to_double(#field, v); }   \
    }
#define TODA_INT(sec, field)                                                                    \
    Key {                                                                                       \
        sec, #field, [](const ExperimentConfig& c) { return std::to_string(c.field); },         \
            [](ExperimentConfig& c, const std::string& v) { c.field = to_int(#field, v); }      \
    }

const std::vector<Key>& schema() {
    static const std::vector<Key> keys = {
        {"problem", "preset", [](const ExperimentConfig& c) { return c.preset; },
         [](ExperimentConfig& c, const std::string& v) { c.preset = v; }},
        {"problem", "family", [](const ExperimentConfig& c) { return family_name(c.family); },
         [](ExperimentConfig& c, const std::string& v) { c.family = parse_family(v); }},
        TODA_INT("problem", rank),
        TODA_INT("problem", points),
        TODA_INT("problem", k),
        {"problem", "eps", [](const ExperimentConfig& c) { return fmt_list(c.eps); },
         [](ExperimentConfig& c, const std::string& v) { c.eps = parse_list(v); }},
        {"problem", "deltas", [](const ExperimentConfig& c) { return fmt_list(c.deltas); },
         [](ExperimentConfig& c, const std::string& v) { c.deltas = parse_list(v); }},
        TODA_NUM("problem", p),
        TODA_NUM("problem", d_factor),
        TODA_NUM("problem", ripple),
        {"surface", "model", [](const ExperimentConfig& c) { return model_name(c.model); },
         [](ExperimentConfig& c, const std::string& v) { c.model = parse_model(v); }},
        {"surface", "normalized", [](const ExperimentConfig& c) { return std::string(c.normalized ? "true" : "false"); },
         [](ExperimentConfig& c, const std::string& v) { c.normalized = to_bool("normalized", v); }},
        TODA_INT("grid", spec.degree),
        TODA_NUM("grid", spec.h_fine),
        TODA_NUM("grid", spec.h_coarse),
        TODA_NUM("grid", spec.fine_halfwidth),
        TODA_NUM("grid", spec.h_cutoff),
        TODA_NUM("grid", tail),
        TODA_INT("grid", ntheta),
        TODA_NUM("solver", tol),
        TODA_INT("solver", max_iter),
        TODA_NUM("solver", damping),
        TODA_NUM("solver", ball_radius),
        TODA_NUM("solver", cap),
        {"solver", "green", [](const ExperimentConfig& c) { return green_name(c.green); },
         [](ExperimentConfig& c, const std::string& v) { c.green = parse_green(v); }},
        TODA_NUM("solver", rate_slack),
        TODA_NUM("solver", band_factor),
        TODA_NUM("solver", rho_band),
        TODA_NUM("solver", contraction),
        TODA_NUM("solver", residual_tol),
        {"output", "dir", [](const ExperimentConfig& c) { return c.out_dir; },
         [](ExperimentConfig& c, const std::string& v) { c.out_dir = v; }},
        TODA_INT("output", jobs),
    };
    return keys;
}
#undef TODA_NUM
#undef TODA_INT

std::string key_name(const Key& k) {
    const auto dot = k.name.find('.');
    return dot == std::string::npos ? k.name : k.name.substr(dot + 1);
}

const std::vector<std::string> kSections = {"problem", "surface", "grid", "solver", "output"};

std::string render(const ExperimentConfig& c, bool with_output) {
    std::ostringstream os;
    for (const auto& sec : kSections) {
        if (sec == "output" && !with_output) continue;
        os << "[" << sec << "]\n";
        for (const auto& k : schema())
            if (k.section == sec) os << key_name(k) << " = " << k.get(c) << "\n";
    }
    return os.str();
}

void check(const ExperimentConfig& c) {
    bool known = false;
    for (const auto& n : preset_names()) known = known || n == c.preset;
    if (!known) throw std::invalid_argument("config: unknown preset '" + c.preset + "'");
    if (c.rank < 2) throw std::invalid_argument("config: rank must be at least 2");
    if (c.points < 1) throw std::invalid_argument("config: points must be positive");
    if (c.k < 0) throw std::invalid_argument("config: k must be non-negative");
    for (double e : c.eps)
        if (!(e > 0 && e < 1)) throw std::invalid_argument("config: eps values must lie in (0, 1)");
    for (double d : c.deltas)
        if (!(d > 0 && d < 1)) throw std::invalid_argument("config: deltas must lie in (0, 1)");
    if (!(c.p >= 1)) throw std::invalid_argument("config: p must be at least 1");
    if (!(std::abs(c.ripple) < 1)) throw std::invalid_argument("config: ripple must be below 1 in magnitude");
    if (c.spec.degree < 2 || !(c.spec.h_fine > 0) || !(c.spec.h_coarse > 0) || !(c.spec.h_cutoff > 0))
        throw std::invalid_argument("config: invalid grid spacing");
    if (c.ntheta < 1) throw std::invalid_argument("config: ntheta must be positive");
    if (!(c.damping > 0 && c.damping <= 1)) throw std::invalid_argument("config: damping must lie in (0, 1]");
    if (c.max_iter < 1 || !(c.tol > 0)) throw std::invalid_argument("config: invalid iteration controls");
    if (c.jobs < 1) throw std::invalid_argument("config: jobs must be positive");
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"identities", "green", "project", "kernel", "theta", "residual-rates", "invnorm", "solve"};
}

ExperimentConfig preset_config(const std::string& name) {
    ExperimentConfig c;
    c.preset = name;
    if (name == "theta" || name == "residual-rates" || name == "invnorm") c.eps = {1e-2, 1e-3, 1e-4, 1e-5};
    if (name == "kernel") c.rank = 4;  // alphas 2, 4, 6, 8
    check(c);
    return c;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw std::invalid_argument("config: empty list entry in '" + s + "'");
        out.push_back(to_double("list", item));
    }
    if (out.empty()) throw std::invalid_argument("config: empty list");
    return out;
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig c;
    std::string section;
    std::map<std::string, bool> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = " (line " + std::to_string(lineno) + ")";
        if (line.front() == '[') {
            if (line.back() != ']') throw std::invalid_argument("config: malformed section header" + where);
            section = trim(line.substr(1, line.size() - 2));
            bool ok = false;
            for (const auto& s : kSections) ok = ok || s == section;
            if (!ok) throw std::invalid_argument("config: unknown section [" + section + "]" + where);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("config: expected key = value" + where);
        if (section.empty()) throw std::invalid_argument("config: key outside a section" + where);
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        const Key* match = nullptr;
        for (const auto& k : schema())
            if (k.section == section && key_name(k) == key) match = &k;
        if (!match) throw std::invalid_argument("config: unknown key '" + key + "' in [" + section + "]" + where);
        if (seen[section + "." + key]) throw std::invalid_argument("config: duplicate key '" + key + "'" + where);
        seen[section + "." + key] = true;
        match->set(c, value);
    }
    check(c);
    return c;
}

std::string to_text(const ExperimentConfig& c) { return render(c, true); }

std::string config_hash(const ExperimentConfig& c) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : render(c, false)) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

BlowupConfig blowup_config(const ExperimentConfig& c, double eps) {
    BlowupConfig b = make_config(c.family, c.rank, c.model, c.normalized, c.points, eps, c.k > 0 ? c.k : -1);
    b.spec = c.spec;
    b.tail = c.tail;
    b.ntheta = c.ntheta;
    b.p = c.p;
    b.d_factor = c.d_factor;
    b.green = c.green;
    if (c.ripple != 0) {
        for (auto& v : b.potentials) v = Potential::ripple(1.0, c.ripple, b.k, b.surface.radius);
    }
    return b;
}

SolverOptions solver_options(const ExperimentConfig& c) {
    SolverOptions o;
    o.tol = c.tol;
    o.max_iter = c.max_iter;
    o.damping = c.damping;
    o.ball_radius = c.ball_radius;
    o.cap = c.cap;
    return o;
}

}  // namespace toda
