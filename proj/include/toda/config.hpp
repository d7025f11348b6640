#pragma once

#include <string>
#include <vector>

#include "toda/ansatz.hpp"
#include "toda/nonlinear.hpp"

namespace toda {

// Experiment description; round-trips through the sectioned key-value text
// format of to_text / parse_config.
struct ExperimentConfig {
    // [problem]
    std::string preset = "solve";
    Family family = Family::A;
    int rank = 2;
    int points = 1;
    int k = 0;  // 0 selects the smallest admissible symmetry order
    std::vector<double> eps = {1e-2, 1e-3, 1e-4};
    std::vector<double> deltas = {1e-1, 3e-2, 1e-2};
    double p = 1.1;
    double d_factor = 1.0;
    double ripple = 0.0;  // amplitude of the k-fold potential ripple
    // [surface]
    Model model = Model::UnitDisk;
    bool normalized = false;
    // [grid]
    LineGridSpec spec;
    double tail = kDefaultTail;
    int ntheta = 1;
    // [solver]
    double tol = 1e-10;
    int max_iter = 100;
    double damping = 1.0;
    double ball_radius = 1.0;
    double cap = 50.0;
    GreenMethod green = GreenMethod::ClosedForm;
    double rate_slack = 0.08;
    double band_factor = 3.0;
    double rho_band = 0.05;
    double contraction = 0.5;
    double residual_tol = 1e-8;
    // [output]
    std::string out_dir = ".";
    int jobs = 1;

    bool operator==(const ExperimentConfig&) const = default;
};

std::vector<std::string> preset_names();
// Defaults of a named preset; throws std::invalid_argument for unknown names.
ExperimentConfig preset_config(const std::string& name);

// Throws std::invalid_argument on syntax errors, unknown sections or keys,
// and malformed values.
ExperimentConfig parse_config(const std::string& text);
std::string to_text(const ExperimentConfig& c);
// FNV-1a hash (hex) of the canonical text without the [output] section.
std::string config_hash(const ExperimentConfig& c);

std::vector<double> parse_list(const std::string& s);

BlowupConfig blowup_config(const ExperimentConfig& c, double eps);
SolverOptions solver_options(const ExperimentConfig& c);

}  // namespace toda
