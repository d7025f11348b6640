#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>
#include <boost/rational.hpp>

namespace toda {

using Rational = boost::rational<long long>;

enum class Family { A, B, C, G2 };

std::string family_name(Family f);
Family parse_family(const std::string& name);

struct CartanData {
    Family family = Family::A;
    int rank = 0;
    std::vector<std::vector<int>> a;  // 0-based, a[i][i] == 2
    std::vector<int> alpha;           // bubble exponents
    std::vector<Rational> q;          // delta_i = eps^{q_i}

    int entry(int i, int j) const { return a[i][j]; }
    double q_value(int i) const;
};

CartanData build_cartan(Family family, int n);

// alpha_i - 2 + sum_{i'<i} a_{ii'} alpha_{i'} for every i (all zero when
// the exponents are consistent).
std::vector<long long> alpha_identity_defects(const CartanData& cd);
// q_i alpha_i + sum_{i'>i} a_{ii'} alpha_{i'} q_{i'} - 1, exactly.
std::vector<Rational> scale_identity_defects(const CartanData& cd);

// a_* = (N-1)/N * a_{N,N-1} a_{N-1,N}.
Rational a_star(const CartanData& cd);

// Gauss-Jordan reduction of the Cartan matrix without pivoting: T a = D with
// D diagonal.  Returns D and T.
struct Reduction {
    std::vector<std::vector<Rational>> diagonalised;
    std::vector<std::vector<Rational>> transform;
};
Reduction reduce_cartan(const CartanData& cd);

// Expected diagonal (2, 3/2, ..., N/(N-1), 2 - a_*).
std::vector<Rational> reduced_diagonal_table(const CartanData& cd);

// delta(i, j) = d(i, j) * eps^{q_i}.
Eigen::MatrixXd delta_values(const CartanData& cd, const Eigen::MatrixXd& d, double eps);

// Largest eps below which delta_{i,j} < delta_{i+1,j} for all i, j.
double separation_threshold(const CartanData& cd, const Eigen::MatrixXd& d);

struct DCoefficients {
    Eigen::MatrixXd d;      // N x m
    Eigen::MatrixXd log_d;  // N x m
    Eigen::VectorXd robin;
    Eigen::MatrixXd cross_green;  // cross_green(j', j) = G(xi_{j'}, xi_j)
    Eigen::MatrixXd potential;    // V_i(xi_j), N x m
    Eigen::VectorXd mass;         // varrho(xi_j)
    double max_residual = 0.0;
};

// Back-substitution of the balancing identities for log d_{i,j}, from i = N
// down to i = 1, independently for every point j.
DCoefficients solve_d_coefficients(const CartanData& cd, const Eigen::VectorXd& robin,
                                   const Eigen::MatrixXd& cross_green,
                                   const Eigen::MatrixXd& potential, const Eigen::VectorXd& mass);

// Left side minus right side of the balancing identities for given log d.
Eigen::MatrixXd d_identity_residual(const CartanData& cd, const Eigen::MatrixXd& log_d,
                                    const Eigen::VectorXd& robin,
                                    const Eigen::MatrixXd& cross_green,
                                    const Eigen::MatrixXd& potential,
                                    const Eigen::VectorXd& mass);

}  // namespace toda
