#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "toda/config.hpp"
#include "toda/experiments.hpp"

namespace {

constexpr int kExitFailedChecks = 1;
constexpr int kExitBadInput = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void print_error(const std::string& kind, const std::string& message) {
    nlohmann::ordered_json j;
    j["error"] = kind;
    j["message"] = message;
    std::cerr << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Asymmetric Toda blow-up experiment runner"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a preset or a config file and write <preset>.csv and <preset>.json");
    std::string preset, config_file, out_dir, eps_list;
    int jobs = 0;
    run->add_option("preset", preset, "Preset name (defaults for the run)");
    run->add_option("--config", config_file, "Config file with sections problem, surface, grid, solver, output");
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--eps", eps_list, "Comma-separated eps values");
    run->add_option("--jobs", jobs, "Worker threads for independent eps values")->check(CLI::PositiveNumber);

    auto* list = app.add_subcommand("presets", "List preset names");
    auto* show = app.add_subcommand("show", "Print the config text of a preset");
    std::string show_name;
    show->add_option("preset", show_name)->required();

    CLI11_PARSE(app, argc, argv);

    if (list->parsed()) {
        for (const auto& n : toda::preset_names()) std::cout << n << "\n";
        return 0;
    }

    toda::ExperimentConfig c;
    try {
        if (show->parsed()) {
            std::cout << toda::to_text(toda::preset_config(show_name));
            return 0;
        }
        if (preset.empty() && config_file.empty()) throw std::invalid_argument("give a preset name or --config FILE");
        if (!config_file.empty()) {
            c = toda::parse_config(read_file(config_file));
            if (!preset.empty() && preset != c.preset)
                throw std::invalid_argument("preset '" + preset + "' conflicts with config preset '" + c.preset + "'");
        } else {
            c = toda::preset_config(preset);
        }
        if (!out_dir.empty()) c.out_dir = out_dir;
        if (!eps_list.empty()) c.eps = toda::parse_list(eps_list);
        if (jobs > 0) c.jobs = jobs;
        // Re-validate after overrides.
        c = toda::parse_config(toda::to_text(c));
    } catch (const std::exception& e) {
        print_error("invalid_config", e.what());
        return kExitBadInput;
    }

    toda::Report report;
    try {
        report = toda::run_preset(c);
    } catch (const std::exception& e) {
        print_error("run_failed", e.what());
        return kExitFailedChecks;
    }

    try {
        const std::filesystem::path dir(c.out_dir);
        toda::write_atomic((dir / (c.preset + ".csv")).string(), report.csv());
        toda::write_atomic((dir / (c.preset + ".json")).string(), report.json());
    } catch (const std::exception& e) {
        print_error("write_failed", e.what());
        return kExitBadInput;
    }

    const auto failures = report.failures();
    std::size_t passed = 0;
    for (const auto& ch : report.checks) passed += ch.verdict == toda::Verdict::Pass;
    std::cout << c.preset << ": " << passed << " checks passed, " << failures.size() << " failed\n";
    if (!failures.empty()) {
        nlohmann::ordered_json j;
        j["preset"] = c.preset;
        j["config_hash"] = report.config_hash;
        j["failures"] = failures;
        std::cerr << j.dump(2) << "\n";
        return kExitFailedChecks;
    }
    return 0;
}
