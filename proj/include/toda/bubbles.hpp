#pragma once

#include <limits>
#include <numbers>

#include <Eigen/Core>

#include "toda/geometry.hpp"
#include "toda/numerics.hpp"

namespace toda {

// w(y) = log(2 alpha^2 tau^alpha / (tau^alpha + |y|^alpha)^2).
double bubble_eval(int alpha, double tau, double rho);
double bubble_eval(int alpha, double tau, const Eigen::Vector2d& y);

// |y|^{alpha-2} e^{w}: the singular Liouville nonlinearity of the bubble.
double bubble_weight(int alpha, double tau, double rho);

// Density of |y|^{alpha-2} e^{w} dy per d(log|y|) dtheta at log radius sigma:
// (alpha^2 / 2) sech^2(alpha (sigma - log tau) / 2).
double bubble_log_density(int alpha, double log_tau, double sigma);

// log(tau^alpha + rho^alpha) given log rho, without overflow.
double log_bubble_denominator(int alpha, double log_tau, double log_rho);

// Planar mass of |y|^{alpha-2} e^{w} over |y| < r.
QuadResult bubble_mass(int alpha, double tau, double r = std::numeric_limits<double>::infinity());
// Closed form 4 pi alpha (1 - tau^alpha / (tau^alpha + r^alpha)).
double truncated_mass(int alpha, double tau, double r);

enum class ProjectionMethod { PdeSolve, Expansion };

struct ProjectedField {
    Field values;  // ns x nt
    int alpha = 2;
    double delta = 1.0;
    ProjectionMethod method = ProjectionMethod::PdeSolve;
    double residual = 0.0;  // relative algebraic residual of the solve
};

// Cutoff weight chi(|y| / r0) at the radial nodes of an axis chart.
Eigen::VectorXd chart_cutoff(const SurfaceGrid& grid, const Chart& chart);
// Cylinder density of chi e^{-phi} |y|^{alpha-2} e^{U} at the radial nodes.
Eigen::VectorXd bubble_source(const SurfaceGrid& grid, const Chart& chart, int alpha, double delta);
// Z(y) = (1 - |y/delta|^alpha) / (1 + |y/delta|^alpha) at the radial nodes.
Eigen::VectorXd z_profile(const SurfaceGrid& grid, const Chart& chart, int alpha, double delta);

// Mean-zero Neumann projections of the cutoff bubble and of its scaling
// derivative, for centres on the symmetry axis.
ProjectedField project_bubble(const PoissonSolver& solver, const Chart& chart, int alpha, double delta);
ProjectedField project_Z(const PoissonSolver& solver, const Chart& chart, int alpha, double delta);

// Leading-order expansions: chi (U - log(2 alpha^2 delta^alpha)) + 4 pi alpha H
// and 2 delta^alpha / (delta^alpha + |y|^alpha).
ProjectedField expansion_PU(const SurfaceGrid& grid, const GreenData& green, int alpha, double delta);
ProjectedField expansion_PZ(const SurfaceGrid& grid, const Chart& chart, int alpha, double delta);

// Mass weight rho(xi) of an interior point.
inline constexpr double kInteriorMass = 8.0 * std::numbers::pi;

}  // namespace toda
