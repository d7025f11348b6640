#pragma once

#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseLU>

#include "toda/numerics.hpp"

namespace toda {

enum class Model { UnitDisk, Sphere, Hemisphere };

std::string model_name(Model m);
Model parse_model(const std::string& name);

// Rotationally symmetric model surface.  Points are stored as 3-vectors; the
// disk lives in the plane z = 0, the sphere and the upper hemisphere are
// centred at the origin.  Cylinder coordinates (s, theta) are s = log|y| and
// the polar angle of the isothermal chart y at the north pole (disk centre);
// in them the metric reads e^{psi(s)} (ds^2 + dtheta^2).
struct Surface {
    Model model = Model::UnitDisk;
    bool normalized = false;
    double radius = 1.0;  // disk radius or sphere radius

    double area() const;
    bool has_boundary() const { return model != Model::Sphere; }
    double gauss_curvature() const;
    double boundary_geodesic_curvature() const;

    double s_max() const;   // boundary position, +inf for the sphere
    double mirror() const;  // log(2a): the south chart has log radius 2 mirror - s
    double psi(double s) const;
    Eigen::Vector3d point(double s, double theta) const;
    std::pair<double, double> cylinder(const Eigen::Vector3d& x) const;
    bool contains(const Eigen::Vector3d& x) const;
    // Distance to the boundary in the metric (infinite for the sphere).
    double boundary_distance(const Eigen::Vector3d& x) const;
    double geodesic_distance(const Eigen::Vector3d& a, const Eigen::Vector3d& b) const;
    Eigen::Vector3d rotate(const Eigen::Vector3d& x, int k, int times = 1) const;
    Eigen::Vector3d random_point(std::mt19937_64& rng, double margin = 0.0) const;
};

Surface make_surface(Model model, bool normalized);

// Radial cutoff: 1 on [0, 1], 0 on [2, inf), smooth logistic blend of
// exp(-1/x) profiles in between.
struct CutoffValue {
    double value = 0, d1 = 0, d2 = 0;
};
CutoffValue cutoff(double t);

// Isothermal chart centred at xi, obtained from stereographic projection for
// the sphere models (scaled so the conformal factor vanishes at the centre)
// and from translation for the disk.
class Chart {
public:
    Chart() = default;
    Chart(const Surface& surface, const Eigen::Vector3d& centre, double r0);

    const Eigen::Vector3d& centre() const { return centre_; }
    // Radius of the chart ball in y; the cutoff radius satisfies r0 < r_xi / 4.
    double r_xi() const { return r_xi_; }
    double r0() const { return r0_; }
    // +1 for the north pole or disk centre, -1 for the south pole, 0 otherwise.
    int axis() const { return axis_; }

    Eigen::Vector2d y(const Eigen::Vector3d& x) const;
    double y_norm(const Eigen::Vector3d& x) const;
    Eigen::Vector3d x(const Eigen::Vector2d& y) const;
    // Conformal factor as a function of |y|.
    double conformal(double rho) const;
    double cutoff_at(const Eigen::Vector3d& x) const { return cutoff(y_norm(x) / r0_).value; }
    // Axis charts: log|y| at cylinder coordinate s.
    double log_radius(double s) const;
    // Axis charts: cylinder coordinate of chart log radius sigma.
    double cylinder_s(double sigma) const;

private:
    Surface surface_;
    Eigen::Vector3d centre_ = Eigen::Vector3d::Zero();
    Eigen::Matrix3d rot_ = Eigen::Matrix3d::Identity();
    double r_xi_ = 0, r0_ = 0;
    int axis_ = 0;
};

// Default cutoff radius: a fifth of the chart radius.
Chart chart_at(const Surface& surface, const Eigen::Vector3d& xi, double r0 = -1.0);

std::vector<Eigen::Vector3d> symmetric_centers(const Surface& surface, int k);

class SurfaceGrid;

enum class GreenMethod { ClosedForm, Numeric };

// Neumann Green function with mean zero, G = Gamma + H with
// Gamma = -(1/2pi) chi log|y|.
class GreenData {
public:
    double G(const Eigen::Vector3d& x) const;
    double H(const Eigen::Vector3d& x) const;
    double robin() const { return robin_; }
    GreenMethod method() const { return method_; }
    const Chart& chart() const { return chart_; }

    friend GreenData green_closed_form(const Surface& surface, const Chart& chart);
    friend GreenData green_numeric(std::shared_ptr<const SurfaceGrid> grid, const Chart& chart);

private:
    Surface surface_;
    Chart chart_;
    GreenMethod method_ = GreenMethod::ClosedForm;
    double robin_ = 0;
    std::shared_ptr<const SurfaceGrid> grid_;
    Eigen::VectorXd nodal_h_;
    double closed_G(const Eigen::Vector3d& x) const;
    double closed_H(const Eigen::Vector3d& x) const;
};

GreenData green_closed_form(const Surface& surface, const Chart& chart);
// Solves the regular-part problem on the cylinder grid (centres on the axis).
GreenData green_numeric(std::shared_ptr<const SurfaceGrid> grid, const Chart& chart);

using Field = Eigen::MatrixXd;  // rows: radial nodes, columns: angular samples

// Tensor grid of spectral-element nodes in s and equispaced angles.
class SurfaceGrid {
public:
    SurfaceGrid(const Surface& surface, LineGrid line, AngularGrid angular);

    const Surface& surface() const { return surface_; }
    const LineGrid& line() const { return line_; }
    const AngularGrid& angular() const { return angular_; }
    int ns() const { return line_.size(); }
    int nt() const { return angular_.size(); }
    const Eigen::VectorXd& s() const { return line_.nodes(); }
    const Eigen::VectorXd& psi() const { return psi_; }
    // Lumped weight times e^psi: integral of a radial f is 2 pi sum measure f.
    const Eigen::VectorXd& measure() const { return measure_; }
    double area() const { return area_; }

    double integrate(const Field& f) const;
    double integrate_density(const Eigen::VectorXd& cyl) const;
    double mean(const Field& f) const { return integrate(f) / area_; }
    Field subtract_mean(const Field& f) const;
    double lp_norm(const Field& f, double p) const;
    Eigen::Vector3d point(int n, int m) const;
    Field broadcast(const Eigen::VectorXd& radial) const;
    template <class F>
    Field sample(F&& f) const {
        Field out(ns(), nt());
        for (int m = 0; m < nt(); ++m)
            for (int n = 0; n < ns(); ++n) out(n, m) = f(point(n, m));
        return out;
    }
    double rotation_defect(const Field& f) const { return angular_.rotation_defect(f); }

private:
    Surface surface_;
    LineGrid line_;
    AngularGrid angular_;
    Eigen::VectorXd psi_, measure_;
    double area_ = 0;
};

// Truncation depth (in s) below the smallest declared scale.
constexpr double kDefaultTail = 20.0;

// Line grid for a surface, refined around the given cylinder coordinates; the
// lower end sits `tail` below min(centres).
std::shared_ptr<SurfaceGrid> make_surface_grid(const Surface& surface,
                                               const std::vector<double>& centres,
                                               const LineGridSpec& spec, const AngularGrid& angular,
                                               double tail = kDefaultTail,
                                               const std::vector<RefineWindow>& extra = {});

// Cylinder-coordinate band of the cutoff transition r0 < |y| < 2 r0 of an axis
// chart, meshed at spec.h_cutoff.
RefineWindow cutoff_window(const Chart& chart, const LineGridSpec& spec);

// Mean-zero Neumann solver for -Delta_g u = g - mean(g) on a SurfaceGrid.
class PoissonSolver {
public:
    explicit PoissonSolver(std::shared_ptr<const SurfaceGrid> grid);

    // Axisymmetric solve from the cylinder density c = e^psi g.  The solution
    // has integral `integral`.
    Eigen::VectorXd solve_density(const Eigen::VectorXd& cyl, double integral = 0.0) const;
    // Pointwise data g on the full grid, all retained angular modes.
    Field solve(const Field& g) const;

    const SurfaceGrid& grid() const { return *grid_; }

private:
    const Eigen::SparseLU<Eigen::SparseMatrix<double>>& factor(int mode) const;

    std::shared_ptr<const SurfaceGrid> grid_;
    Eigen::SparseMatrix<double> stiffness_;
    mutable std::vector<std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>>> lu_;
};

}  // namespace toda
