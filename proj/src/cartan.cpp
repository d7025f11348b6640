#include "toda/cartan.hpp"

#include <cmath>
#include <stdexcept>

namespace toda {

std::string family_name(Family f) {
    switch (f) {
        case Family::A: return "A";
        case Family::B: return "B";
        case Family::C: return "C";
        case Family::G2: return "G2";
    }
    return "?";
}

Family parse_family(const std::string& name) {
    if (name == "A" || name == "a") return Family::A;
    if (name == "B" || name == "b") return Family::B;
    if (name == "C" || name == "c") return Family::C;
    if (name == "G2" || name == "g2" || name == "G") return Family::G2;
    throw std::invalid_argument("unknown Cartan family '" + name + "'");
}

double CartanData::q_value(int i) const {
    return static_cast<double>(q[i].numerator()) / static_cast<double>(q[i].denominator());
}

CartanData build_cartan(Family family, int n) {
    if (n < 2) throw std::invalid_argument("build_cartan: rank must be at least 2");
    if (family == Family::G2 && n != 2) throw std::invalid_argument("build_cartan: G2 has rank 2");
    CartanData cd;
    cd.family = family;
    cd.rank = n;
    cd.a.assign(n, std::vector<int>(n, 0));
    for (int i = 0; i < n; ++i) {
        cd.a[i][i] = 2;
        if (i + 1 < n) cd.a[i][i + 1] = cd.a[i + 1][i] = -1;
    }
    switch (family) {
        case Family::A: break;
        case Family::B: cd.a[n - 2][n - 1] = -2; break;
        case Family::C: cd.a[n - 1][n - 2] = -2; break;
        case Family::G2: cd.a[1][0] = -3; break;
    }
    cd.alpha.resize(n);
    for (int i = 0; i + 1 < n; ++i) cd.alpha[i] = 2 * (i + 1);
    cd.alpha[n - 1] = 2 - 2 * (n - 1) * cd.a[n - 1][n - 2];
    cd.q.resize(n);
    cd.q[n - 1] = Rational(1, cd.alpha[n - 1]);
    const int shift = family == Family::B ? 2 : 1;
    for (int i = 0; i + 1 < n; ++i) cd.q[i] = Rational(n + shift - (i + 1), cd.alpha[i]);
    return cd;
}

std::vector<long long> alpha_identity_defects(const CartanData& cd) {
    std::vector<long long> out(cd.rank);
    for (int i = 0; i < cd.rank; ++i) {
        long long v = cd.alpha[i] - 2;
        for (int k = 0; k < i; ++k) v += static_cast<long long>(cd.a[i][k]) * cd.alpha[k];
        out[i] = v;
    }
    return out;
}

std::vector<Rational> scale_identity_defects(const CartanData& cd) {
    std::vector<Rational> out(cd.rank);
    for (int i = 0; i < cd.rank; ++i) {
        Rational v = cd.q[i] * cd.alpha[i];
        for (int k = i + 1; k < cd.rank; ++k) v += cd.q[k] * (cd.a[i][k] * cd.alpha[k]);
        out[i] = v - 1;
    }
    return out;
}

Rational a_star(const CartanData& cd) {
    const int n = cd.rank;
    return Rational(n - 1, n) * (cd.a[n - 1][n - 2] * cd.a[n - 2][n - 1]);
}

Reduction reduce_cartan(const CartanData& cd) {
    const int n = cd.rank;
    Reduction r;
    r.diagonalised.assign(n, std::vector<Rational>(n));
    r.transform.assign(n, std::vector<Rational>(n));
    auto& m = r.diagonalised;
    auto& t = r.transform;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m[i][j] = cd.a[i][j];
        t[i][i] = 1;
    }
    auto eliminate = [&](int target, int pivot) {
        const Rational f = m[target][pivot] / m[pivot][pivot];
        if (f.numerator() == 0) return;
        for (int j = 0; j < n; ++j) {
            m[target][j] -= f * m[pivot][j];
            t[target][j] -= f * t[pivot][j];
        }
    };
    for (int k = 0; k < n; ++k) {
        if (m[k][k].numerator() == 0) throw std::runtime_error("reduce_cartan: zero pivot");
        for (int i = k + 1; i < n; ++i) eliminate(i, k);
    }
    for (int k = n - 1; k >= 0; --k)
        for (int i = k - 1; i >= 0; --i) eliminate(i, k);
    return r;
}

std::vector<Rational> reduced_diagonal_table(const CartanData& cd) {
    const int n = cd.rank;
    std::vector<Rational> out(n);
    for (int i = 0; i + 1 < n; ++i) out[i] = Rational(i + 2, i + 1);
    out[n - 1] = Rational(2) - a_star(cd);
    return out;
}

Eigen::MatrixXd delta_values(const CartanData& cd, const Eigen::MatrixXd& d, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("delta_values: eps must lie in (0, 1)");
    if (d.rows() != cd.rank) throw std::invalid_argument("delta_values: d has wrong number of rows");
    Eigen::MatrixXd out(d.rows(), d.cols());
    for (int i = 0; i < d.rows(); ++i)
        for (int j = 0; j < d.cols(); ++j) {
            if (!(d(i, j) > 0)) throw std::invalid_argument("delta_values: d must be positive");
            out(i, j) = d(i, j) * std::pow(eps, cd.q_value(i));
        }
    return out;
}

double separation_threshold(const CartanData& cd, const Eigen::MatrixXd& d) {
    double best = 1.0;
    for (int i = 0; i + 1 < cd.rank; ++i) {
        const double gap = cd.q_value(i) - cd.q_value(i + 1);
        for (int j = 0; j < d.cols(); ++j) {
            // d_i eps^{q_i} < d_{i+1} eps^{q_{i+1}}  <=>  eps < (d_{i+1}/d_i)^{1/gap}
            best = std::min(best, std::pow(d(i + 1, j) / d(i, j), 1.0 / gap));
        }
    }
    return best;
}

namespace {

// Right side of the balancing identity for row i at point j.
double balance_rhs(const CartanData& cd, int i, int j, const Eigen::VectorXd& robin,
                   const Eigen::MatrixXd& cross_green, const Eigen::MatrixXd& potential,
                   const Eigen::VectorXd& mass) {
    double coupling = cd.alpha[i];
    for (int k = 0; k < cd.rank; ++k)
        if (k != i) coupling += 0.5 * cd.a[i][k] * cd.alpha[k];
    double interaction = mass(j) * robin(j);
    for (int jj = 0; jj < robin.size(); ++jj)
        if (jj != j) interaction += mass(jj) * cross_green(jj, j);
    return -2.0 * std::log(static_cast<double>(cd.alpha[i])) + 0.5 * coupling * interaction +
           std::log(potential(i, j));
}

}  // namespace

Eigen::MatrixXd d_identity_residual(const CartanData& cd, const Eigen::MatrixXd& log_d,
                                    const Eigen::VectorXd& robin,
                                    const Eigen::MatrixXd& cross_green,
                                    const Eigen::MatrixXd& potential,
                                    const Eigen::VectorXd& mass) {
    const int n = cd.rank;
    const int m = static_cast<int>(robin.size());
    Eigen::MatrixXd res(n, m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) {
            double lhs = cd.alpha[i] * log_d(i, j);
            for (int k = i + 1; k < n; ++k) lhs += cd.a[i][k] * cd.alpha[k] * log_d(k, j);
            res(i, j) = lhs - balance_rhs(cd, i, j, robin, cross_green, potential, mass);
        }
    return res;
}

DCoefficients solve_d_coefficients(const CartanData& cd, const Eigen::VectorXd& robin,
                                   const Eigen::MatrixXd& cross_green,
                                   const Eigen::MatrixXd& potential, const Eigen::VectorXd& mass) {
    const int n = cd.rank;
    const int m = static_cast<int>(robin.size());
    if (potential.rows() != n || potential.cols() != m || mass.size() != m ||
        cross_green.rows() != m || cross_green.cols() != m)
        throw std::invalid_argument("solve_d_coefficients: inconsistent input sizes");
    if ((potential.array() <= 0.0).any())
        throw std::invalid_argument("solve_d_coefficients: potentials must be positive at the points");
    DCoefficients out;
    out.robin = robin;
    out.cross_green = cross_green;
    out.potential = potential;
    out.mass = mass;
    out.log_d.setZero(n, m);
    for (int j = 0; j < m; ++j)
        for (int i = n - 1; i >= 0; --i) {
            double v = balance_rhs(cd, i, j, robin, cross_green, potential, mass);
            for (int k = i + 1; k < n; ++k) v -= cd.a[i][k] * cd.alpha[k] * out.log_d(k, j);
            out.log_d(i, j) = v / cd.alpha[i];
        }
    out.d = out.log_d.array().exp();
    out.max_residual =
        d_identity_residual(cd, out.log_d, robin, cross_green, potential, mass).cwiseAbs().maxCoeff();
    return out;
}

}  // namespace toda
