#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseLU>

#include "toda/ansatz.hpp"

namespace toda {

// Potential of the limit operator, 2 alpha^2 r^{alpha-2} / (1 + r^alpha)^2.
double limit_potential(int alpha, double r);

// Kernel of the limit operator in polar coordinates.
struct KernelFunctions {
    int alpha = 2;
    double phi0(double r) const;
    double phi1(double r, double theta) const;
    double phi2(double r, double theta) const;
    // Radial factor r^{alpha/2} / (1 + r^alpha) of phi1 and phi2.
    double angular_profile(double r) const;
};
KernelFunctions kernel_functions(int alpha);

// Sup of the second-order finite-difference residual of r^2 (-Delta - V) on
// profile(sigma) e^{i mode theta}, sigma = log r, over a uniform grid of
// spacing h on [-halfwidth, halfwidth].
double limit_operator_residual(int alpha, int mode, const std::function<double(double)>& profile,
                               double h, double halfwidth);

// Discrete energy quotient of the limit operator on a radial-in-sigma profile
// for angular mode `mode`: (E - V-term) / E.
double limit_rayleigh_quotient(int alpha, int mode, const std::function<double(double)>& profile,
                               double h, double halfwidth);

// Integrals of 2 alpha^2 |y|^{alpha-2} (1+|y|^alpha)^{-2} z(y) w(y) dy with
// z = (1-|y|^alpha)/(1+|y|^alpha) for w = 1, log(1+|y|^alpha), log|y|.
std::array<QuadResult, 3> quadrature_identities(int alpha);
// Integral of the limit potential over the plane.
QuadResult limit_potential_mass(int alpha);

// Sampled field after restriction to the modes retained by the grid.
Eigen::MatrixXd symmetric_projection(const AngularGrid& grid, const Eigen::MatrixXd& samples);
bool mode_retained(const AngularGrid& grid, int mode);

// 2N - a_{N-1,N} a_{N,N-1} (N-1).
long long coupling_nondegeneracy(const CartanData& cd);

struct InverseNormEstimate {
    double value = 0.0;              // max over modes
    std::vector<int> modes;
    std::vector<double> per_mode;
    std::vector<int> iterations;
    bool converged = true;
};

// Linearised Toda operator around an ansatz on the k-symmetric, mean-zero
// space.  Bubble weights are radial, so the discrete operator is block
// diagonal over the retained angular modes.  Mode 0 carries one mean
// multiplier per component.
class LinearizedSystem {
public:
    explicit LinearizedSystem(const Ansatz& ansatz);

    int N() const { return n_; }
    const SurfaceGrid& grid() const { return *grid_; }
    const Eigen::VectorXd& weight(int i) const { return weight_[i]; }
    double coupling(int i, int l) const { return coupling_[i][l]; }

    // Pointwise values of L applied to the mean-zero part of phi.
    std::vector<Field> apply(const std::vector<Field>& phi) const;
    // Mean-zero solution of L phi = h - mean(h).
    std::vector<Field> solve(const std::vector<Field>& h) const;
    // sqrt(sum_i int |grad phi_i|^2).
    double energy_norm(const std::vector<Field>& phi) const;

    // Power iteration for the energy-to-energy norm of the inverse of the
    // operator preconditioned by the Neumann Laplacian.
    InverseNormEstimate inverse_norm(int max_iter = 400, double tol = 1e-9, unsigned seed = 1) const;

private:
    using Sparse = Eigen::SparseMatrix<double>;
    using LU = Eigen::SparseLU<Sparse>;

    Eigen::VectorXd apply_mode(int mode, const Eigen::VectorXd& x) const;
    Eigen::VectorXd energy_apply(int mode, const Eigen::VectorXd& x) const;
    Eigen::VectorXd solve_mode(int q, const Eigen::VectorXd& rhs, bool transpose) const;
    double mode_inverse_norm(int q, int max_iter, double tol, unsigned seed, int& iterations,
                             bool& converged) const;
    std::vector<Eigen::MatrixXd> coefficients(const std::vector<Field>& f) const;
    std::vector<Field> synthesise(const std::vector<Eigen::MatrixXd>& c) const;

    std::shared_ptr<const SurfaceGrid> grid_;
    int n_ = 0;
    Sparse stiffness_;
    std::vector<std::vector<double>> coupling_;
    std::vector<Eigen::VectorXd> weight_;   // pointwise bubble weights
    std::vector<Eigen::VectorXd> density_;  // lumped weight times cylinder density
    std::vector<std::unique_ptr<LU>> lu_;
};

}  // namespace toda
