#include "toda/bubbles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace toda {

namespace {

constexpr double kPi = std::numbers::pi;

void check_alpha(int alpha) {
    if (alpha < 2) throw std::invalid_argument("bubble exponent must be at least 2");
}

// log(e^a + e^b).
double log_add(double a, double b) {
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

void check_axis(const Chart& chart) {
    if (chart.axis() == 0) throw std::invalid_argument("projection: centre must lie on the symmetry axis");
}

void check_resolution(const SurfaceGrid& grid, const Chart& chart, double delta) {
    if (!(delta > 0)) throw std::invalid_argument("projection: scale must be positive");
    const double s = chart.cylinder_s(std::log(delta));
    int count = 0;
    for (int n = 0; n < grid.ns(); ++n)
        if (std::abs(grid.s()[n] - s) <= std::log(2.0)) ++count;
    if (count < 8) throw std::runtime_error("projection: grid does not resolve the bubble scale");
}

double relative_residual(const PoissonSolver& solver, const Eigen::VectorXd& u, const Eigen::VectorXd& cyl) {
    const SurfaceGrid& g = solver.grid();
    Eigen::VectorXd b = g.line().weights().cwiseProduct(cyl);
    b -= (b.sum() / g.measure().sum()) * g.measure();
    const Eigen::VectorXd r = g.line().stiffness() * u - b;
    // Remove the multiplier component along the measure.
    const double lam = r.dot(g.measure()) / g.measure().squaredNorm();
    return (r - lam * g.measure()).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), 1e-300);
}

}  // namespace

double bubble_eval(int alpha, double tau, double rho) {
    check_alpha(alpha);
    if (!(tau > 0)) throw std::invalid_argument("bubble_eval: tau must be positive");
    const double lt = std::log(tau);
    return std::log(2.0 * alpha * alpha) + alpha * lt - 2.0 * log_bubble_denominator(alpha, lt, std::log(rho));
}

double bubble_eval(int alpha, double tau, const Eigen::Vector2d& y) { return bubble_eval(alpha, tau, y.norm()); }

double bubble_weight(int alpha, double tau, double rho) {
    if (rho == 0) return alpha == 2 ? std::exp(bubble_eval(alpha, tau, 0.0)) : 0.0;
    return std::exp((alpha - 2) * std::log(rho) + bubble_eval(alpha, tau, rho));
}

double bubble_log_density(int alpha, double log_tau, double sigma) {
    const double c = std::cosh(0.5 * alpha * (sigma - log_tau));
    return 0.5 * alpha * alpha / (c * c);
}

double log_bubble_denominator(int alpha, double log_tau, double log_rho) {
    return log_add(alpha * log_tau, alpha * log_rho);
}

QuadResult bubble_mass(int alpha, double tau, double r) {
    check_alpha(alpha);
    return planar_radial_integral([&](double rho) { return bubble_weight(alpha, tau, rho); }, {tau}, r);
}

double truncated_mass(int alpha, double tau, double r) {
    // tau^alpha / (tau^alpha + r^alpha) = 1 / (1 + (r / tau)^alpha).
    return 4.0 * kPi * alpha * (1.0 - 1.0 / (1.0 + std::pow(r / tau, alpha)));
}

Eigen::VectorXd chart_cutoff(const SurfaceGrid& grid, const Chart& chart) {
    check_axis(chart);
    Eigen::VectorXd c(grid.ns());
    for (int n = 0; n < grid.ns(); ++n) c[n] = cutoff(std::exp(chart.log_radius(grid.s()[n])) / chart.r0()).value;
    return c;
}

Eigen::VectorXd bubble_source(const SurfaceGrid& grid, const Chart& chart, int alpha, double delta) {
    check_alpha(alpha);
    const Eigen::VectorXd chi = chart_cutoff(grid, chart);
    const double ld = std::log(delta);
    Eigen::VectorXd c(grid.ns());
    for (int n = 0; n < grid.ns(); ++n)
        c[n] = chi[n] == 0 ? 0.0 : chi[n] * bubble_log_density(alpha, ld, chart.log_radius(grid.s()[n]));
    return c;
}

Eigen::VectorXd z_profile(const SurfaceGrid& grid, const Chart& chart, int alpha, double delta) {
    check_axis(chart);
    const double ld = std::log(delta);
    Eigen::VectorXd z(grid.ns());
    for (int n = 0; n < grid.ns(); ++n) z[n] = -std::tanh(0.5 * alpha * (chart.log_radius(grid.s()[n]) - ld));
    return z;
}

ProjectedField project_bubble(const PoissonSolver& solver, const Chart& chart, int alpha, double delta) {
    const SurfaceGrid& g = solver.grid();
    check_axis(chart);
    check_resolution(g, chart, delta);
    const Eigen::VectorXd cyl = bubble_source(g, chart, alpha, delta);
    const Eigen::VectorXd u = solver.solve_density(cyl);
    return {g.broadcast(u), alpha, delta, ProjectionMethod::PdeSolve, relative_residual(solver, u, cyl)};
}

ProjectedField project_Z(const PoissonSolver& solver, const Chart& chart, int alpha, double delta) {
    const SurfaceGrid& g = solver.grid();
    check_axis(chart);
    check_resolution(g, chart, delta);
    const Eigen::VectorXd cyl =
        bubble_source(g, chart, alpha, delta).cwiseProduct(z_profile(g, chart, alpha, delta));
    const Eigen::VectorXd u = solver.solve_density(cyl);
    return {g.broadcast(u), alpha, delta, ProjectionMethod::PdeSolve, relative_residual(solver, u, cyl)};
}

ProjectedField expansion_PU(const SurfaceGrid& grid, const GreenData& green, int alpha, double delta) {
    check_alpha(alpha);
    const Chart& chart = green.chart();
    const double ld = std::log(delta);
    const double weight = 0.5 * alpha * kInteriorMass;
    Field f(grid.ns(), grid.nt());
    for (int m = 0; m < grid.nt(); ++m)
        for (int n = 0; n < grid.ns(); ++n) {
            const Eigen::Vector3d x = grid.point(n, m);
            const double rho = chart.y_norm(x);
            const double chi = cutoff(rho / chart.r0()).value;
            double v = weight * green.H(x);
            if (chi > 0) v -= 2.0 * chi * log_bubble_denominator(alpha, ld, std::log(rho));
            f(n, m) = v;
        }
    return {f, alpha, delta, ProjectionMethod::Expansion, 0.0};
}

ProjectedField expansion_PZ(const SurfaceGrid& grid, const Chart& chart, int alpha, double delta) {
    check_alpha(alpha);
    const double ld = std::log(delta);
    Field f(grid.ns(), grid.nt());
    for (int m = 0; m < grid.nt(); ++m)
        for (int n = 0; n < grid.ns(); ++n) {
            const double lr = std::log(chart.y_norm(grid.point(n, m)));
            // 2 delta^alpha / (delta^alpha + |y|^alpha).
            f(n, m) = 2.0 * std::exp(alpha * ld - log_bubble_denominator(alpha, ld, lr));
        }
    return {f, alpha, delta, ProjectionMethod::Expansion, 0.0};
}

}  // namespace toda
