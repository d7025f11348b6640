#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "toda/nonlinear.hpp"

using namespace toda;
constexpr double pi = std::numbers::pi;

namespace {
Fields smooth_fields(const Ansatz& a, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.5, 3.0);
    Fields out;
    for (int i = 0; i < a.N(); ++i) {
        const double f = u(rng), g = u(rng);
        const int k = a.config.k;
        out.push_back(a.grid->subtract_mean(a.grid->sample([&](const Eigen::Vector3d& x) {
            const double r2 = x.x() * x.x() + x.y() * x.y();
            return std::cos(f * r2 + g * x.z()) + (a.grid->nt() > 1 ? r2 * std::cos(k * std::atan2(x.y(), x.x())) : 0.0);
        })));
    }
    return out;
}

Fields scaled(const Fields& f, double t) {
    Fields out;
    for (const auto& x : f) out.push_back(t * x);
    return out;
}

double lp(const SurfaceGrid& g, const Fields& f, double p) {
    double s = 0;
    for (const auto& x : f) s += g.lp_norm(x, p);
    return s;
}

Ansatz su3(double eps, int ntheta = 1) {
    auto c = make_config(Family::A, 2, Model::UnitDisk, false, 1, eps);
    if (ntheta > 1) {
        c.ntheta = ntheta;
        c.potentials[1] = Potential::ripple(1.0, 0.25, c.k, 1.0);
    }
    return assemble_ansatz(c);
}
}  // namespace

TEST_CASE("S is linear, mean-zero and small") {
    const auto a = su3(1e-3);
    const SurfaceGrid& g = *a.grid;
    const Fields zero(2, Field::Zero(g.ns(), 1));
    CHECK(lp(g, op_S(a, zero), 1.1) == 0.0);
    const Fields phi = smooth_fields(a, 3);
    const Fields s1 = op_S(a, phi), s2 = op_S(a, scaled(phi, -2.5));
    for (int i = 0; i < 2; ++i) {
        CHECK((s2[i] + 2.5 * s1[i]).cwiseAbs().maxCoeff() <= 1e-12 * s1[i].cwiseAbs().maxCoeff());
        CHECK(std::abs(g.mean(s1[i])) < 1e-10 * (1 + s1[i].cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("S decays with eps at least at the predicted rate") {
    const double p = 1.1;
    std::vector<std::pair<double, double>> pts;
    for (double eps : {1e-2, 1e-3, 1e-4, 1e-5}) {
        const auto a = su3(eps);
        const LinearizedSystem L(a);
        const Fields phi = smooth_fields(a, 11);
        pts.emplace_back(eps, lp(*a.grid, op_S(a, phi), p) / L.energy_norm(phi));
    }
    CHECK(loglog_rate_fit(pts).slope >= (2 - p) / (4 * 2 * p) - 0.08);
}

TEST_CASE("N is quadratic near zero, Lipschitz on balls, mean-zero and guarded") {
    const auto a = su3(1e-3);
    const SurfaceGrid& g = *a.grid;
    const LinearizedSystem L(a);
    const Fields phi = smooth_fields(a, 5);
    const Fields zero(2, Field::Zero(g.ns(), 1));
    CHECK(lp(g, op_N(a, zero), 1.1) == 0.0);
    std::vector<double> q;
    for (double t : {1e-1, 1e-2, 1e-3, 1e-4}) q.push_back(lp(g, op_N(a, scaled(phi, t)), 1.1) / (t * t));
    for (std::size_t k = 1; k < q.size(); ++k) CHECK(q[k] == doctest::Approx(q.back()).epsilon(0.05));
    for (const auto& f : op_N(a, phi)) CHECK(std::abs(g.mean(f)) < 1e-10 * (1 + f.cwiseAbs().maxCoeff()));

    // Lipschitz constant over shrinking balls stays bounded.
    auto lip = [&](double radius, unsigned seed) {
        const Fields f0 = scaled(smooth_fields(a, seed), radius), f1 = scaled(smooth_fields(a, seed + 100), radius);
        const Fields n0 = op_N(a, f0), n1 = op_N(a, f1);
        Fields dn, df;
        for (int i = 0; i < 2; ++i) {
            dn.push_back(n0[i] - n1[i]);
            df.push_back(f0[i] - f1[i]);
        }
        return lp(g, dn, 1.1) / ((L.energy_norm(f0) + L.energy_norm(f1)) * L.energy_norm(df));
    };
    double big = 0, small = 0;
    for (unsigned s = 1; s <= 5; ++s) {
        big = std::max(big, lip(0.5, s));
        small = std::max(small, lip(0.005, s));
    }
    CHECK(std::isfinite(big));
    CHECK(small <= 1.5 * big);

    Fields huge = phi;
    huge[0](0, 0) = 60.0;
    CHECK_THROWS_AS(op_N(a, huge), std::overflow_error);
}

TEST_CASE("fixed point solve for SU(3) on the disk") {
    const auto a = su3(1e-3);
    const LinearizedSystem L(a);
    const auto r = fixed_point_solve(a, L);
    REQUIRE(r.state.status == SolveStatus::Converged);
    CHECK(r.state.iterations < 40);
    CHECK(r.report.max_ratio_after_first < 0.5);
    CHECK(r.report.toda.l2 < 1e-8);
    CHECK(r.report.mean_field_gap < 1e-12);
    CHECK(r.report.phi_norm <= r.state.ball_bound);
    for (const auto& f : r.state.phi) CHECK(std::abs(a.grid->mean(f)) < 1e-10);
    // Reusing the converged correction as the next iterate changes nothing.
    const Fields R = residual(a, a.config.p).R;
    const Fields s = op_S(a, r.state.phi), q = op_N(a, r.state.phi);
    Fields rhs;
    for (int i = 0; i < 2; ++i) rhs.push_back(s[i] + q[i] + R[i]);
    const Fields again = L.solve(rhs);
    Fields diff;
    for (int i = 0; i < 2; ++i) diff.push_back(again[i] - r.state.phi[i]);
    CHECK(L.energy_norm(diff) < 1e-9);
}

TEST_CASE("damped iteration reaches the same fixed point") {
    const auto a = su3(1e-3);
    const LinearizedSystem L(a);
    const auto plain = fixed_point_solve(a, L);
    SolverOptions opt;
    opt.damping = 0.5;
    const auto damped = fixed_point_solve(a, L, opt);
    REQUIRE(damped.state.status == SolveStatus::Converged);
    Fields diff;
    for (int i = 0; i < 2; ++i) diff.push_back(plain.state.phi[i] - damped.state.phi[i]);
    CHECK(L.energy_norm(diff) < 1e-8);
}

TEST_CASE("ball violation is reported") {
    const auto a = su3(1e-2);
    const LinearizedSystem L(a);
    SolverOptions opt;
    opt.ball_radius = 1e-3;
    const auto r = fixed_point_solve(a, L, opt);
    CHECK(r.state.status == SolveStatus::BallViolation);
    CHECK_FALSE(r.state.message.empty());
}

TEST_CASE("symmetric data stays symmetric through the solve") {
    const auto a = su3(1e-3, 12);
    const LinearizedSystem L(a);
    const auto r = fixed_point_solve(a, L);
    REQUIRE(r.state.status == SolveStatus::Converged);
    for (int i = 0; i < 2; ++i) {
        CHECK(a.grid->rotation_defect(r.state.phi[i]) < 1e-10);
        CHECK(a.grid->rotation_defect(r.report.u[i]) < 1e-10);
    }
    CHECK(r.report.toda.l2 < 1e-8);
}

TEST_CASE("masses, weak-* limits and local masses") {
    std::vector<double> dev, far, norms;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        const auto a = su3(eps);
        const LinearizedSystem L(a);
        const auto r = fixed_point_solve(a, L);
        REQUIRE(r.state.status == SolveStatus::Converged);
        const auto& u = r.report.u;
        const auto ones = weak_star_test(a, u, [](const Eigen::Vector3d&) { return 1.0; });
        for (int i = 0; i < 2; ++i) CHECK(ones[i] == doctest::Approx(r.report.rho[i]).epsilon(1e-14));
        const auto all = local_mass(a, u, a.config.points[0], 10.0);
        for (int i = 0; i < 2; ++i) CHECK(all[i] == doctest::Approx(r.report.rho[i]).epsilon(1e-14));
        auto test = [](const Eigen::Vector3d& x) { return 1.0 + x.x() * x.x() + 0.5 * x.y() * x.y(); };
        const auto w = weak_star_test(a, u, test);
        const auto lim = weak_star_limit(a, test);
        for (int i = 0; i < 2; ++i) CHECK(std::abs(w[i] - lim[i]) / lim[i] < 0.05);
        CHECK(lim[0] == doctest::Approx(4 * pi));
        CHECK(lim[1] == doctest::Approx(8 * pi));
        const auto fm = local_mass(a, u, Eigen::Vector3d(0.7, 0, 0), 0.2);
        far.push_back(fm[0] + fm[1]);
        dev.push_back(r.report.rho_deviation);
        norms.push_back(r.report.phi_norm);
    }
    for (int k = 1; k < 3; ++k) {
        CHECK(dev[k] < dev[k - 1]);
        CHECK(far[k] < far[k - 1]);
        CHECK(norms[k] < norms[k - 1]);
    }
    CHECK(dev.back() < 0.05);
}
