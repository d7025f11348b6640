#pragma once

#include <functional>
#include <string>
#include <vector>

#include "toda/linop.hpp"

namespace toda {

using Fields = std::vector<Field>;

// Higher-order linear part: sum_l (a_il/2) ((2 eps V_l e^{W_l} - bubbles_l) phi_l - mean).
Fields op_S(const Ansatz& a, const Fields& phi);

// Quadratic remainder: sum_l (a_il/2) (2 eps V_l e^{W_l} (e^{phi_l} - 1 - phi_l) - mean).
// Throws std::overflow_error when max |phi| exceeds `cap`.
Fields op_N(const Ansatz& a, const Fields& phi, double cap = 50.0);

struct SolverOptions {
    double tol = 1e-10;         // energy norm of the last step
    int max_iter = 100;
    double damping = 1.0;       // 1 = plain Picard, 0.5 = damped variant
    double ball_radius = 1.0;   // R in ||phi|| <= R eps^{(2-p)/(4Np)} |log eps|
    bool check_ball = true;
    double cap = 50.0;          // overflow guard on max |phi|
};

enum class SolveStatus { Converged, MaxIterations, Diverged, BallViolation, Overflow };
std::string status_name(SolveStatus s);

struct CorrectionState {
    Fields phi;
    int iterations = 0;
    std::vector<double> norms;   // ||phi_n|| (energy)
    std::vector<double> steps;   // ||phi_{n} - phi_{n-1}||
    std::vector<double> ratios;  // steps[n] / steps[n-1]
    double ball_bound = 0.0;
    SolveStatus status = SolveStatus::MaxIterations;
    std::string message;
};

struct TodaResidual {
    double l2 = 0.0;    // sum_i ||u_i - mean - (-Delta)^{-1} F_i(u)||_2
    double weak = 0.0;  // L^1 norm of -Delta_h u - F(u)
};

struct SolutionReport {
    Fields u;
    std::vector<double> rho;         // eps int V_i e^{u_i}
    std::vector<double> rho_limit;   // 2 pi alpha_i m
    double rho_deviation = 0.0;      // max_i |rho_i - limit| / limit
    TodaResidual toda;
    double mean_field_gap = 0.0;     // relative difference of the two right-hand sides
    double phi_norm = 0.0;
    double max_ratio_after_first = 0.0;
};

struct FixedPointResult {
    CorrectionState state;
    SolutionReport report;
};

// Picard iteration of phi <- L^{-1}(S(phi) + N(phi) + R).
FixedPointResult fixed_point_solve(const Ansatz& a, const LinearizedSystem& L, const SolverOptions& opt = {});

// Right-hand side of the reformulated system at u: eps sum_l a_il (V_l e^{u_l} - mean).
Fields toda_rhs(const Ansatz& a, const Fields& u);
// Same right-hand side in mean-field form with rho recomputed from u.
Fields mean_field_rhs(const Ansatz& a, const Fields& u);
TodaResidual toda_residual(const Ansatz& a, const Fields& u);

std::vector<double> mass_rho(const Ansatz& a, const Fields& u);
std::vector<double> weak_star_test(const Ansatz& a, const Fields& u,
                                   const std::function<double(const Eigen::Vector3d&)>& test);
// Limit values sum_j 2 pi alpha_i test(xi_j).
std::vector<double> weak_star_limit(const Ansatz& a, const std::function<double(const Eigen::Vector3d&)>& test);
// Mass of eps V_i e^{u_i} in the geodesic ball of radius r about xi.
std::vector<double> local_mass(const Ansatz& a, const Fields& u, const Eigen::Vector3d& xi, double r);

}  // namespace toda
