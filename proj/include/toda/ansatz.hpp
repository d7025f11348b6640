#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "toda/bubbles.hpp"
#include "toda/cartan.hpp"
#include "toda/geometry.hpp"

namespace toda {

// Positive potential, optionally with a k-fold angular ripple:
// V(x) = c (1 + eta (rho / a)^order cos(order theta)), rho the distance to the axis.
class Potential {
public:
    static Potential constant(double c);
    static Potential ripple(double c, double eta, int order, double scale);

    double operator()(const Eigen::Vector3d& x) const;
    bool radial() const { return eta_ == 0.0 || order_ == 0; }
    int order() const { return order_; }
    std::string describe() const;

private:
    double c_ = 1.0, eta_ = 0.0, scale_ = 1.0;
    int order_ = 0;
};

struct BlowupConfig {
    CartanData cartan;
    Surface surface;
    std::vector<Eigen::Vector3d> points;
    int k = 3;
    std::vector<Potential> potentials;  // one per component
    double eps = 1e-3;
    LineGridSpec spec;
    int ntheta = 1;             // angular samples; 1 for axisymmetric data
    double r0 = -1.0;           // cutoff radius, default from the chart
    double p = 1.1;             // Lebesgue exponent of the residual norms
    double tail = kDefaultTail;
    GreenMethod green = GreenMethod::ClosedForm;
    double d_factor = 1.0;      // multiplies every d_{i,j} (1 = balanced)
    // Diagnostic runs may drop the k > alpha_N / 2 requirement.
    bool require_symmetry_order = true;
};

// Standard configuration: Cartan family/rank on a surface, blowing up at the
// first m symmetric centres with constant potentials.
BlowupConfig make_config(Family family, int rank, Model model, bool normalized, int m, double eps, int k = -1);

// Throws std::invalid_argument when a hypothesis fails.
void validate(const BlowupConfig& config);

struct Ansatz {
    BlowupConfig config;
    std::shared_ptr<SurfaceGrid> grid;
    std::shared_ptr<PoissonSolver> solver;
    std::vector<Chart> charts;
    std::vector<GreenData> greens;
    DCoefficients dcoef;
    Eigen::MatrixXd delta;                             // N x m
    std::vector<std::vector<ProjectedField>> pu;       // [i][j]
    std::vector<std::vector<Eigen::VectorXd>> source;  // [i][j], cylinder density
    std::vector<Field> W;                              // [i]
    std::vector<Field> log_potential;                  // [i]
    Eigen::MatrixXd annulus_inner, annulus_outer;      // N x m, chart radii

    int N() const { return config.cartan.rank; }
    int m() const { return static_cast<int>(config.points.size()); }

    // Sum over points of chi e^{-phi} |y|^{alpha_i - 2} e^{U}: cylinder
    // density (times e^psi) and pointwise value.
    Field bubble_density(int i) const;
    Field bubble_pointwise(int i) const;
    // 2 eps V_i e^{W_i + phi}: cylinder density and pointwise value.
    Field exp_density(int i, const Field* phi = nullptr) const;
    Field exp_pointwise(int i, const Field* phi = nullptr) const;
};

Ansatz assemble_ansatz(const BlowupConfig& config);

// Radial refinement centres for a configuration (global cylinder coordinates).
std::vector<double> refinement_centres(const BlowupConfig& config, const std::vector<Chart>& charts,
                                       const Eigen::MatrixXd& delta);

double lp_norm(const SurfaceGrid& grid, const Field& f, double p);

struct ResidualReport {
    std::vector<Field> R;           // per component, pointwise
    std::vector<double> norms;      // ||R^i||_p
    double total = 0.0;             // sum_i ||R^i||_p
    std::vector<Field> difference;  // 2 eps V_i e^{W_i} - bubble weights
    std::vector<double> difference_norms;
    std::vector<double> means;      // integral of R^i
};

ResidualReport residual(const Ansatz& ansatz, double p);

// Interaction exponent at scaled chart point y around xi_j for component i,
// log of 2 eps V_i e^{W_i} over the bubble weight, built from the expansions.
double theta_at(const Ansatz& ansatz, int i, int j, const Eigen::Vector2d& y);

struct ThetaReport {
    int i = 0, j = 0;
    double inner = 0, outer = 0;  // scaled annulus radii
    double sup_abs = 0;           // sup |Theta|
    double sup_ratio = 0;         // sup |Theta| / (delta |y| + eps^{1/(2i)})
    double at_unit = 0;           // Theta at |y| = 1, theta = 0
};

ThetaReport theta(const Ansatz& ansatz, int i, int j, int nradii = 200, int nangles = 4);

}  // namespace toda
