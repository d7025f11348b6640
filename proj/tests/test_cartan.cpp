#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "toda/cartan.hpp"

using namespace toda;

namespace {
std::vector<CartanData> all_families() {
    std::vector<CartanData> out;
    for (Family f : {Family::A, Family::B, Family::C})
        for (int n = 2; n <= 8; ++n) out.push_back(build_cartan(f, n));
    out.push_back(build_cartan(Family::G2, 2));
    return out;
}

// Dense system of the balancing identities at one point: M log d = b.
Eigen::MatrixXd balance_matrix(const CartanData& cd) {
    const int n = cd.rank;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        M(i, i) = cd.alpha[i];
        for (int k = i + 1; k < n; ++k) M(i, k) = cd.a[i][k] * cd.alpha[k];
    }
    return M;
}
}  // namespace

TEST_CASE("worked examples of Cartan data") {
    auto a2 = build_cartan(Family::A, 2);
    CHECK(a2.a == std::vector<std::vector<int>>{{2, -1}, {-1, 2}});
    CHECK(a2.alpha == std::vector<int>{2, 4});
    CHECK(a2.q == std::vector<Rational>{Rational(1), Rational(1, 4)});

    auto g2 = build_cartan(Family::G2, 2);
    CHECK(g2.a == std::vector<std::vector<int>>{{2, -1}, {-3, 2}});
    CHECK(g2.alpha == std::vector<int>{2, 8});
    CHECK(g2.q == std::vector<Rational>{Rational(1), Rational(1, 8)});

    auto c3 = build_cartan(Family::C, 3);
    CHECK(c3.alpha == std::vector<int>{2, 4, 10});
    CHECK(c3.q == std::vector<Rational>{Rational(3, 2), Rational(1, 2), Rational(1, 10)});
    CHECK(c3.a[2][1] == -2);

    auto b3 = build_cartan(Family::B, 3);
    CHECK(b3.a[1][2] == -2);
    CHECK(b3.a[2][1] == -1);
}

TEST_CASE("construction errors") {
    CHECK_THROWS(build_cartan(Family::A, 1));
    CHECK_THROWS(build_cartan(Family::G2, 3));
    CHECK_THROWS(parse_family("E"));
    CHECK(parse_family("B") == Family::B);
}

TEST_CASE("exact exponent identities for every family") {
    for (const auto& cd : all_families()) {
        const std::string fam = family_name(cd.family);
        CAPTURE(fam);
        CAPTURE(cd.rank);
        for (int i = 0; i < cd.rank; ++i) {
            CHECK(cd.a[i][i] == 2);
            CHECK(cd.alpha[i] % 2 == 0);
            CHECK(cd.q[i] > Rational(0));
        }
        for (long long d : alpha_identity_defects(cd)) CHECK(d == 0);
        for (const Rational& d : scale_identity_defects(cd)) CHECK(d == Rational(0));
    }
}

TEST_CASE("step-four reduction constants") {
    for (const auto& cd : all_families()) {
        const int n = cd.rank;
        const Rational expected = [&] {
            switch (cd.family) {
                case Family::A: return Rational(n - 1, n);
                case Family::B:
                case Family::C: return Rational(2 * (n - 1), n);
                case Family::G2: return Rational(3, 2);
            }
            return Rational(0);
        }();
        CHECK(a_star(cd) == expected);
        CHECK(Rational(2) - a_star(cd) > Rational(0));
        CHECK(2 * n - cd.a[n - 2][n - 1] * cd.a[n - 1][n - 2] * (n - 1) != 0);
        const Reduction r = reduce_cartan(cd);
        const auto table = reduced_diagonal_table(cd);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) {
                    CHECK(r.diagonalised[i][i] == table[i]);
                    CHECK(r.diagonalised[i][i] > Rational(0));
                } else {
                    CHECK(r.diagonalised[i][j] == Rational(0));
                }
            }
        // T a == D, exactly.
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Rational s(0);
                for (int k = 0; k < n; ++k) s += r.transform[i][k] * cd.a[k][j];
                CHECK(s == r.diagonalised[i][j]);
            }
    }
    const Reduction a2 = reduce_cartan(build_cartan(Family::A, 2));
    CHECK(a2.transform[0][0] == Rational(4, 3));
    CHECK(a2.transform[0][1] == Rational(2, 3));
    CHECK(a2.transform[1][0] == Rational(1, 2));
    CHECK(a2.transform[1][1] == Rational(1));
}

TEST_CASE("scales") {
    auto a2 = build_cartan(Family::A, 2);
    Eigen::MatrixXd d = Eigen::MatrixXd::Ones(2, 1);
    Eigen::MatrixXd del = delta_values(a2, d, 1e-4);
    CHECK(del(0, 0) == doctest::Approx(1e-4).epsilon(1e-14));
    CHECK(del(1, 0) == doctest::Approx(1e-1).epsilon(1e-14));
    CHECK_THROWS(delta_values(a2, d, 0.0));
    CHECK_THROWS(delta_values(a2, d, 1.0));
    CHECK_THROWS(delta_values(a2, -d, 0.1));
    for (int n = 3; n <= 6; ++n) {
        auto cd = build_cartan(Family::A, n);
        const double eps = 1e-3;
        Eigen::MatrixXd del2 = delta_values(cd, Eigen::MatrixXd::Ones(n, 1), eps);
        for (int i = 2; i <= n - 1; ++i)
            CHECK(del2(i - 2, 0) / del2(i - 1, 0) ==
                  doctest::Approx(std::pow(eps, double(n + 1) / (2.0 * (i - 1) * i))).epsilon(1e-12));
    }
    Eigen::MatrixXd dd(2, 1);
    dd << 1.0 / 8, 1.0 / 2;
    const double th = separation_threshold(a2, dd);
    Eigen::MatrixXd below = delta_values(a2, dd, 0.9 * th);
    CHECK(below(0, 0) < below(1, 0));
    if (th < 0.9) {
        Eigen::MatrixXd above = delta_values(a2, dd, std::min(0.99, 1.1 * th));
        CHECK(above(0, 0) >= above(1, 0));
    }
}

TEST_CASE("d coefficients: SU(3) example and dense-solve oracle") {
    auto a2 = build_cartan(Family::A, 2);
    Eigen::VectorXd robin = Eigen::VectorXd::Zero(1), mass = Eigen::VectorXd::Ones(1);
    Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(1, 1), V = Eigen::MatrixXd::Ones(2, 1);
    auto dc = solve_d_coefficients(a2, robin, cross, V, mass);
    CHECK(dc.d(1, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(dc.d(0, 0) == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(dc.max_residual < 1e-12);
    // 4 log d2 = -2 log 4 and 2 log d1 - 4 log d2 = -2 log 2.
    Eigen::Vector2d b(-2 * std::log(2.0), -2 * std::log(4.0));
    Eigen::VectorXd oracle = balance_matrix(a2).fullPivLu().solve(b);
    CHECK((oracle - dc.log_d.col(0)).cwiseAbs().maxCoeff() < 1e-14);

    // Scaling V_i by e raises row i of the right side by one.
    for (const auto& cd : {build_cartan(Family::B, 3), build_cartan(Family::G2, 2), build_cartan(Family::C, 4)}) {
        const int n = cd.rank;
        Eigen::VectorXd r(2), m(2);
        r << -0.3, 0.17;
        m << 8 * M_PI, 8 * M_PI;
        Eigen::MatrixXd G(2, 2);
        G << 0, -0.08, -0.08, 0;
        Eigen::MatrixXd Vp = Eigen::MatrixXd::Constant(n, 2, 1.3);
        auto base = solve_d_coefficients(cd, r, G, Vp, m);
        CHECK(base.max_residual < 1e-12);
        for (int i = 0; i < n; ++i) {
            Eigen::MatrixXd V2 = Vp;
            V2.row(i) *= std::exp(1.0);
            auto shifted = solve_d_coefficients(cd, r, G, V2, m);
            Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
            e[i] = 1.0;
            Eigen::VectorXd delta = balance_matrix(cd).fullPivLu().solve(e);
            for (int j = 0; j < 2; ++j)
                CHECK(((shifted.log_d.col(j) - base.log_d.col(j)) - delta).cwiseAbs().maxCoeff() < 1e-12);
        }
        // Reordering the points permutes the result.
        Eigen::VectorXd r2(2), m2 = m;
        r2 << r[1], r[0];
        auto swapped = solve_d_coefficients(cd, r2, G, Vp, m2);
        CHECK((swapped.log_d.col(0) - base.log_d.col(1)).cwiseAbs().maxCoeff() < 1e-14);
        CHECK((swapped.log_d.col(1) - base.log_d.col(0)).cwiseAbs().maxCoeff() < 1e-14);
    }
    CHECK_THROWS(solve_d_coefficients(a2, robin, cross, -V, mass));
}
