#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace toda {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

// Composite 15-point Gauss-Kronrod rule over the panels given by sorted
// breakpoints; the error is the summed Kronrod/Gauss discrepancy.
QuadResult integrate_panels(const std::function<double(double)>& f,
                            const std::vector<double>& breaks);

// Uniform panels of width at most h on [a, b].
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double h = 0.25);

// Planar integral of a radial function, 2*pi * int_0^rmax g(r) r dr, computed
// in the variable s = log r.  The panels are graded so that every scale in
// `scales` receives at least `per_decade` panels per decade; the integrand is
// assumed to be negligible below min(scales) * 1e-12 and, when rmax is
// infinite, above max(scales) * 1e12.
QuadResult planar_radial_integral(const std::function<double(double)>& g,
                                  const std::vector<double>& scales,
                                  double rmax, int per_decade = 16);

struct RateFit {
    std::vector<double> log_x;
    std::vector<double> log_y;
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // root-mean-square deviation in log space
};

// Least-squares slope of log y against log x.  Requires at least three pairs
// with positive entries.
RateFit loglog_rate_fit(const std::vector<std::pair<double, double>>& xy);

// Gauss-Lobatto-Legendre rule of polynomial degree p on [-1, 1].
struct GllRule {
    int degree = 0;
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
    Eigen::MatrixXd diff;  // diff(a, b) = l_b'(x_a)
};

GllRule gll_rule(int degree);

// Interval [lo, hi] meshed with spacing at most h.
struct RefineWindow {
    double lo = 0, hi = 0, h = 0;
};

struct LineGridSpec {
    int degree = 10;
    double h_fine = 0.25;
    double h_coarse = 1.0;
    double fine_halfwidth = 3.0;
    double h_cutoff = 0.0625;  // spacing across cutoff transitions

    bool operator==(const LineGridSpec&) const = default;
};

// Continuous spectral-element discretisation of an interval [lo, hi] in the
// log-radial variable s.  Nodes are shared at element interfaces.
class LineGrid {
public:
    LineGrid() = default;
    LineGrid(std::vector<double> breaks, int degree);

    // Elements of width h_fine within fine_halfwidth of each centre, h_coarse
    // elsewhere; extra windows impose their own spacing.
    static LineGrid graded(double lo, double hi, const std::vector<double>& centres,
                           const LineGridSpec& spec, const std::vector<RefineWindow>& extra = {});

    int size() const { return static_cast<int>(nodes_.size()); }
    int elements() const { return static_cast<int>(breaks_.size()) - 1; }
    int degree() const { return rule_.degree; }
    double lo() const { return breaks_.front(); }
    double hi() const { return breaks_.back(); }
    const std::vector<double>& breaks() const { return breaks_; }
    const Eigen::VectorXd& nodes() const { return nodes_; }
    // Lumped (diagonal) mass: integral of each nodal basis function.
    const Eigen::VectorXd& weights() const { return weights_; }
    int node(int element, int local) const { return element * rule_.degree + local; }

    // int u' v' ds.
    Eigen::SparseMatrix<double> stiffness() const;
    // Nodal derivative; interface values are averaged.
    Eigen::VectorXd derivative(const Eigen::VectorXd& u) const;
    // Derivative at the two interval ends, from the adjacent element only.
    double derivative_lo(const Eigen::VectorXd& u) const;
    double derivative_hi(const Eigen::VectorXd& u) const;
    // Polynomial interpolant of nodal data at s (clamped to the interval).
    double interpolate(const Eigen::VectorXd& u, double s) const;
    // int_lo^s of the interpolant of nodal data.
    double integral_to(const Eigen::VectorXd& u, double s) const;
    // Minimum number of nodes per unit length of s.
    double min_node_density() const;

private:
    int element_of(double s) const;
    double interpolate_in(const Eigen::VectorXd& u, int e, double xi) const;

    std::vector<double> breaks_;
    GllRule rule_;
    Eigen::VectorXd nodes_;
    Eigen::VectorXd weights_;
};

// Equispaced angular samples on the full circle together with the Fourier
// modes kept by the k-symmetric projection.
class AngularGrid {
public:
    AngularGrid() = default;
    // ntheta == 1 means an axisymmetric representation.
    AngularGrid(int k, int ntheta);

    int k() const { return k_; }
    int size() const { return ntheta_; }
    double theta(int m) const;
    // Retained modes: multiples of k strictly below ntheta / 2 (and 0).
    const std::vector<int>& modes() const { return modes_; }
    bool symmetric() const { return ntheta_ == 1 || ntheta_ % k_ == 0; }

    // Coefficients of cos(l t) and sin(l t) for every retained mode; column
    // 2q holds the cosine part of modes()[q], column 2q+1 the sine part.
    Eigen::MatrixXd analyse(const Eigen::MatrixXd& samples) const;
    Eigen::MatrixXd synthesise(const Eigen::MatrixXd& coeffs, int rows) const;
    // Largest change of a field under the rotation by 2 pi / k.
    double rotation_defect(const Eigen::MatrixXd& samples) const;

private:
    int k_ = 1;
    int ntheta_ = 1;
    std::vector<int> modes_;
};

}  // namespace toda
