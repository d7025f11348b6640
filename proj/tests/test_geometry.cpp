#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "toda/geometry.hpp"

using namespace toda;
constexpr double pi = std::numbers::pi;

namespace {
const Model kModels[] = {Model::UnitDisk, Model::Sphere, Model::Hemisphere};

Eigen::Vector3d north(const Surface& s) {
    return s.model == Model::UnitDisk ? Eigen::Vector3d::Zero() : Eigen::Vector3d(0, 0, s.radius);
}

// Radial integral of a function of x over the surface, in cylinder coordinates.
double radial_integral(const Surface& s, const std::function<double(const Eigen::Vector3d&)>& f,
                       double lo = -40.0) {
    const double hi = s.model == Model::Sphere ? 2 * s.mirror() - lo : s.s_max();
    return integrate([&](double t) { return 2 * pi * f(s.point(t, 0.3)) * std::exp(s.psi(t)); }, lo, hi, 0.05).value;
}
}  // namespace

TEST_CASE("surface data") {
    CHECK(make_surface(Model::UnitDisk, true).area() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(make_surface(Model::Sphere, true).area() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(make_surface(Model::Hemisphere, true).area() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(make_surface(Model::Sphere, false).area() == doctest::Approx(4 * pi).epsilon(1e-12));
    auto h = make_surface(Model::Hemisphere, false);
    CHECK(h.has_boundary());
    CHECK(h.boundary_geodesic_curvature() == 0.0);
    CHECK(make_surface(Model::UnitDisk, false).boundary_geodesic_curvature() == 1.0);
    CHECK(make_surface(Model::UnitDisk, false).gauss_curvature() == 0.0);
    CHECK(!make_surface(Model::Sphere, false).has_boundary());
    CHECK_THROWS(parse_model("torus"));
    for (Model m : kModels)
        for (bool nrm : {false, true}) {
            auto s = make_surface(m, nrm);
            CHECK(radial_integral(s, [](const Eigen::Vector3d&) { return 1.0; }) ==
                  doctest::Approx(s.area()).epsilon(1e-12));
        }
}

TEST_CASE("cylinder coordinates invert the surface parametrisation") {
    for (Model m : kModels) {
        auto s = make_surface(m, false);
        for (double t : {-20.0, -3.0, -0.2, 0.5, s.model == Model::Sphere ? 25.0 : s.s_max() - 0.01}) {
            if (t > s.s_max()) continue;
            const Eigen::Vector3d x = s.point(t, 1.1);
            CHECK(s.contains(x));
            auto [t2, th] = s.cylinder(x);
            CHECK(t2 == doctest::Approx(t).epsilon(1e-12));
            CHECK(th == doctest::Approx(1.1).epsilon(1e-12));
        }
    }
}

TEST_CASE("charts") {
    auto disk = make_surface(Model::UnitDisk, false);
    Chart c = chart_at(disk, Eigen::Vector3d::Zero());
    CHECK(c.conformal(0.3) == 0.0);
    CHECK(c.axis() == 1);
    CHECK(c.r0() < c.r_xi() / 4);
    CHECK_THROWS(chart_at(disk, Eigen::Vector3d(0.995, 0, 0)));
    CHECK_THROWS(chart_at(disk, Eigen::Vector3d(0, 0, 0), 0.3));
    CHECK_THROWS(chart_at(disk, Eigen::Vector3d(2, 0, 0)));

    auto sphere = make_surface(Model::Sphere, false);
    Chart n = chart_at(sphere, north(sphere));
    CHECK(n.conformal(0.0) == 0.0);
    const double h = 1e-5;
    CHECK(std::abs((n.conformal(h) - n.conformal(0)) / h) < 1e-4);
    Chart sp = chart_at(sphere, -north(sphere));
    CHECK(sp.axis() == -1);
    // Chart maps are inverse to each other and isometric up to the conformal factor.
    std::mt19937_64 rng(7);
    for (Model m : kModels) {
        auto s = make_surface(m, false);
        for (int trial = 0; trial < 20; ++trial) {
            const Eigen::Vector3d xi = s.random_point(rng, 0.3 * s.radius);
            Chart ch = chart_at(s, xi);
            CHECK(ch.y(xi).norm() < 1e-12);
            const Eigen::Vector2d y(0.13 * s.radius, -0.07 * s.radius);
            CHECK((ch.y(ch.x(y)) - y).norm() < 1e-12);
            const Eigen::Vector2d dy(1e-6, 0.0);
            const double ds = (ch.x(y + dy) - ch.x(y - dy)).norm() / 2e-6;
            CHECK(ds * ds == doctest::Approx(std::exp(ch.conformal(y.norm()))).epsilon(1e-7));
        }
    }
}

TEST_CASE("conformal factor equation converges at second order") {
    // -Laplace(phi) = 2 K e^phi, checked with the five-point Laplacian.
    auto s = make_surface(Model::Sphere, false);
    Chart c = chart_at(s, north(s));
    const double K = s.gauss_curvature();
    auto phi = [&](double y1, double y2) { return c.conformal(std::hypot(y1, y2)); };
    std::vector<std::pair<double, double>> errs;
    for (double h : {0.1, 0.05, 0.025, 0.0125}) {
        double worst = 0;
        for (double y1 : {0.0, 0.3, 0.7})
            for (double y2 : {0.0, 0.4}) {
                const double lap = (phi(y1 + h, y2) + phi(y1 - h, y2) + phi(y1, y2 + h) + phi(y1, y2 - h) -
                                    4 * phi(y1, y2)) / (h * h);
                worst = std::max(worst, std::abs(-lap - 2 * K * std::exp(phi(y1, y2))));
            }
        errs.emplace_back(h, worst);
    }
    CHECK(loglog_rate_fit(errs).slope >= 1.8);
}

TEST_CASE("cutoff profile") {
    CHECK(cutoff(0.5).value == 1.0);
    CHECK(cutoff(2.5).value == 0.0);
    CHECK(cutoff(1.5).value == doctest::Approx(0.5));
    for (double t : {1.1, 1.3, 1.7, 1.95}) {
        const double h = 1e-5;
        CHECK(cutoff(t).d1 == doctest::Approx((cutoff(t + h).value - cutoff(t - h).value) / (2 * h)).epsilon(1e-6));
        CHECK(cutoff(t).d2 == doctest::Approx((cutoff(t + h).d1 - cutoff(t - h).d1) / (2 * h)).epsilon(1e-5));
    }
    CHECK(cutoff(1.0 + 1e-9).d1 == 0.0);
}

TEST_CASE("symmetric centres") {
    CHECK(symmetric_centers(make_surface(Model::UnitDisk, false), 3).size() == 1);
    auto sc = symmetric_centers(make_surface(Model::Sphere, false), 5);
    REQUIRE(sc.size() == 2);
    CHECK(sc[0].z() == 1.0);
    CHECK(sc[1].z() == -1.0);
    auto hc = symmetric_centers(make_surface(Model::Hemisphere, false), 3);
    REQUIRE(hc.size() == 1);
    CHECK(make_surface(Model::Hemisphere, false).boundary_distance(hc[0]) > 0);
}

TEST_CASE("closed-form Green functions: mean zero, boundedness, symmetry") {
    std::mt19937_64 rng(11);
    for (Model m : kModels)
        for (bool nrm : {false, true}) {
            auto s = make_surface(m, nrm);
            CAPTURE(model_name(m));
            const Eigen::Vector3d xi = north(s);
            GreenData g = green_closed_form(s, chart_at(s, xi));
            CHECK(std::abs(radial_integral(s, [&](const Eigen::Vector3d& x) { return g.G(x); })) < 1e-8);
            CHECK(std::abs(radial_integral(s, [&](const Eigen::Vector3d& x) { return g.H(x); }) -
                           radial_integral(s, [&](const Eigen::Vector3d& x) {
                               const double r = g.chart().y_norm(x);
                               return cutoff(r / g.chart().r0()).value * std::log(r) / (2 * pi);
                           })) < 1e-8);
            // G + log|y| / 2pi stays bounded and tends to the Robin value.
            for (double r : {1e-3, 1e-6, 1e-9}) {
                const Eigen::Vector3d x = g.chart().x(Eigen::Vector2d(r, 0));
                CHECK(g.G(x) + std::log(r) / (2 * pi) == doctest::Approx(g.robin()).epsilon(1e-5));
                CHECK(g.H(x) == doctest::Approx(g.robin()).epsilon(1e-5));
            }
            // Symmetry at random pairs.
            for (int t = 0; t < 100; ++t) {
                const Eigen::Vector3d a = s.random_point(rng, 0.05 * s.radius);
                const Eigen::Vector3d b = s.random_point(rng, 0.05 * s.radius);
                if (s.geodesic_distance(a, b) < 1e-3) continue;
                const double gab = green_closed_form(s, chart_at(s, b)).G(a);
                const double gba = green_closed_form(s, chart_at(s, a)).G(b);
                CHECK(std::abs(gab - gba) < 1e-6);
                // Off-diagonal G equals H - Gamma for every chart.
                GreenData gb = green_closed_form(s, chart_at(s, b));
                const double rho = gb.chart().y_norm(a);
                CHECK(gb.G(a) == doctest::Approx(gb.H(a) - cutoff(rho / gb.chart().r0()).value * std::log(rho) / (2 * pi))
                                     .epsilon(1e-10));
            }
        }
}

TEST_CASE("closed-form Robin values") {
    auto d = make_surface(Model::UnitDisk, true);
    GreenData g = green_closed_form(d, chart_at(d, Eigen::Vector3d::Zero()));
    CHECK(g.robin() == doctest::Approx(std::log(d.radius) / (2 * pi) - 3 / (8 * pi)).epsilon(1e-14));
    auto s = make_surface(Model::Sphere, false);
    GreenData gs = green_closed_form(s, chart_at(s, north(s)));
    CHECK(gs.robin() == doctest::Approx((std::log(2.0) - 0.5) / (2 * pi)).epsilon(1e-14));
    CHECK(gs.G(-north(s)) == doctest::Approx(-1 / (4 * pi)).epsilon(1e-14));
}

TEST_CASE("Neumann condition on the boundary") {
    std::mt19937_64 rng(3);
    for (Model m : {Model::UnitDisk, Model::Hemisphere}) {
        auto s = make_surface(m, false);
        for (int t = 0; t < 10; ++t) {
            const Eigen::Vector3d xi = s.random_point(rng, 0.2);
            GreenData g = green_closed_form(s, chart_at(s, xi));
            for (double th : {0.0, 1.0, 2.5, 4.0}) {
                const double h = 1e-5;
                double dn;
                if (m == Model::UnitDisk) {
                    auto at = [&](double r) { return g.G(Eigen::Vector3d(r * std::cos(th), r * std::sin(th), 0)); };
                    dn = (at(1.0) - at(1.0 - h)) / h;
                } else {
                    auto at = [&](double lat) {
                        return g.G(Eigen::Vector3d(std::cos(lat) * std::cos(th), std::cos(lat) * std::sin(th), std::sin(lat)));
                    };
                    dn = (at(h) - at(0.0)) / h;
                }
                CHECK(std::abs(dn) < 1e-3);
            }
        }
    }
}

TEST_CASE("rotation invariance") {
    std::mt19937_64 rng(5);
    for (Model m : kModels) {
        auto s = make_surface(m, false);
        for (int t = 0; t < 20; ++t) {
            const Eigen::Vector3d xi = s.random_point(rng, 0.1), x = s.random_point(rng, 0.0);
            GreenData g = green_closed_form(s, chart_at(s, xi));
            GreenData gr = green_closed_form(s, chart_at(s, s.rotate(xi, 3)));
            CHECK(std::abs(gr.G(s.rotate(x, 3)) - g.G(x)) < 1e-10);
            CHECK(std::abs(gr.H(s.rotate(x, 3)) - g.H(x)) < 1e-10);
        }
    }
}

TEST_CASE("numeric regular part agrees with the closed form") {
    for (Model m : kModels)
        for (bool nrm : {false, true}) {
            auto s = make_surface(m, nrm);
            CAPTURE(model_name(m));
            CAPTURE(nrm);
            std::vector<Eigen::Vector3d> centres = {north(s)};
            if (m == Model::Sphere) centres.push_back(-north(s));
            for (const auto& xi : centres) {
                Chart c = chart_at(s, xi);
                const double l0 = c.cylinder_s(std::log(c.r0())), l1 = c.cylinder_s(std::log(2 * c.r0()));
                auto grid = make_surface_grid(s, {l0, l1}, LineGridSpec{}, AngularGrid(1, 1), kDefaultTail,
                                              {cutoff_window(c, LineGridSpec{})});
                GreenData gn = green_numeric(grid, c);
                GreenData gc = green_closed_form(s, c);
                CHECK(gn.robin() == doctest::Approx(gc.robin()).epsilon(1e-8));
                for (double t : {-5.0, -1.5, -0.7, 0.3, 2.0}) {
                    if (t >= s.s_max()) continue;
                    const Eigen::Vector3d x = s.point(t + std::log(s.radius), 0.4);
                    CHECK(std::abs(gn.G(x) - gc.G(x)) < 1e-6);
                }
            }
        }
    // Regression constant: Robin value at the centre of the normalised disk.
    auto d = make_surface(Model::UnitDisk, true);
    Chart c = chart_at(d, Eigen::Vector3d::Zero());
    auto grid = make_surface_grid(d, {std::log(c.r0())}, LineGridSpec{}, AngularGrid(1, 1), kDefaultTail,
                                  {cutoff_window(c, LineGridSpec{})});
    CHECK_THROWS(green_numeric(make_surface_grid(d, {0.0}, LineGridSpec{4, 1.0, 1.0}, AngularGrid(1, 1)), c));
    CHECK(green_numeric(grid, c).robin() == doctest::Approx(-std::log(pi) / (4 * pi) - 3 / (8 * pi)).epsilon(1e-8));
}

TEST_CASE("Poisson solver on the sphere reproduces spherical harmonics") {
    // -Delta Y = l(l+1) Y for Y = P_l(cos) and its k-fold angular analogue.
    auto s = make_surface(Model::Sphere, false);
    auto grid = make_surface_grid(s, {0.0, std::log(2.0)}, LineGridSpec{}, AngularGrid(2, 8), 20.0);
    PoissonSolver solver(grid);
    Field g = grid->sample([](const Eigen::Vector3d& x) { return 6.0 * (1.5 * x.z() * x.z() - 0.5) + 6.0 * (x.x() * x.x() - x.y() * x.y()); });
    Field u = solver.solve(g);
    Field expected = grid->sample([](const Eigen::Vector3d& x) { return (1.5 * x.z() * x.z() - 0.5) + (x.x() * x.x() - x.y() * x.y()); });
    CHECK((u - expected).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(std::abs(grid->mean(u)) < 1e-12);
    CHECK(grid->rotation_defect(u) < 1e-12);
}
