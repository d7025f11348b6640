#include "toda/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Geometry>

namespace toda {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// log(1 + e^x) without overflow.
double softplus(double x) { return x > 30.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// |y| of the stereographic image (scaled by 2a) of a unit vector.
double stereo_norm(const Eigen::Vector3d& u, double a) {
    const double rho = std::hypot(u.x(), u.y());
    if (u.z() >= 0) return 2.0 * a * rho / (1.0 + u.z());
    if (rho == 0) return kInf;
    return 2.0 * a * (1.0 - u.z()) / rho;
}

// Unit vector with stereographic coordinate y (scaled by 2a).
Eigen::Vector3d stereo_inverse(const Eigen::Vector2d& y, double a) {
    const double z = y.norm() / (2.0 * a);
    if (z == 0) return Eigen::Vector3d(0, 0, 1);
    double sin_p, cos_p;
    if (z <= 1) {
        sin_p = 2.0 * z / (1.0 + z * z);
        cos_p = (1.0 - z * z) / (1.0 + z * z);
    } else {
        const double w = 1.0 / z;
        sin_p = 2.0 * w / (1.0 + w * w);
        cos_p = (w * w - 1.0) / (w * w + 1.0);
    }
    const Eigen::Vector2d dir = y / y.norm();
    return {sin_p * dir.x(), sin_p * dir.y(), cos_p};
}

bool spherical(Model m) { return m != Model::UnitDisk; }

}  // namespace

std::string model_name(Model m) {
    switch (m) {
        case Model::UnitDisk: return "disk";
        case Model::Sphere: return "sphere";
        case Model::Hemisphere: return "hemisphere";
    }
    return "?";
}

Model parse_model(const std::string& name) {
    if (name == "disk" || name == "unit_disk" || name == "UnitDisk") return Model::UnitDisk;
    if (name == "sphere" || name == "Sphere") return Model::Sphere;
    if (name == "hemisphere" || name == "Hemisphere") return Model::Hemisphere;
    throw std::invalid_argument("unsupported surface model: " + name);
}

Surface make_surface(Model model, bool normalized) {
    Surface s;
    s.model = model;
    s.normalized = normalized;
    switch (model) {
        case Model::UnitDisk: s.radius = normalized ? 1.0 / std::sqrt(kPi) : 1.0; break;
        case Model::Sphere: s.radius = normalized ? 0.5 / std::sqrt(kPi) : 1.0; break;
        case Model::Hemisphere: s.radius = normalized ? 1.0 / std::sqrt(2.0 * kPi) : 1.0; break;
    }
    return s;
}

double Surface::area() const {
    const double r2 = radius * radius;
    switch (model) {
        case Model::UnitDisk: return kPi * r2;
        case Model::Sphere: return 4.0 * kPi * r2;
        case Model::Hemisphere: return 2.0 * kPi * r2;
    }
    return 0;
}

double Surface::gauss_curvature() const { return spherical(model) ? 1.0 / (radius * radius) : 0.0; }

double Surface::boundary_geodesic_curvature() const {
    switch (model) {
        case Model::UnitDisk: return 1.0 / radius;
        case Model::Hemisphere: return 0.0;
        case Model::Sphere: return std::numeric_limits<double>::quiet_NaN();
    }
    return 0;
}

double Surface::s_max() const {
    switch (model) {
        case Model::UnitDisk: return std::log(radius);
        case Model::Hemisphere: return mirror();
        case Model::Sphere: return kInf;
    }
    return 0;
}

double Surface::mirror() const { return spherical(model) ? std::log(2.0 * radius) : std::log(radius); }

double Surface::psi(double s) const {
    if (!spherical(model)) return 2.0 * s;
    return 2.0 * s - 2.0 * softplus(2.0 * (s - mirror()));
}

Eigen::Vector3d Surface::point(double s, double theta) const {
    const double r = std::exp(s);
    const Eigen::Vector2d y(r * std::cos(theta), r * std::sin(theta));
    if (!spherical(model)) return {y.x(), y.y(), 0.0};
    return radius * stereo_inverse(y, radius);
}

std::pair<double, double> Surface::cylinder(const Eigen::Vector3d& x) const {
    const double theta = std::atan2(x.y(), x.x());
    if (!spherical(model)) return {std::log(std::hypot(x.x(), x.y())), theta};
    return {std::log(stereo_norm(x / radius, radius)), theta};
}

bool Surface::contains(const Eigen::Vector3d& x) const {
    const double tol = 1e-9 * radius;
    switch (model) {
        case Model::UnitDisk: return std::abs(x.z()) <= tol && std::hypot(x.x(), x.y()) <= radius + tol;
        case Model::Sphere: return std::abs(x.norm() - radius) <= tol;
        case Model::Hemisphere: return std::abs(x.norm() - radius) <= tol && x.z() >= -tol;
    }
    return false;
}

double Surface::boundary_distance(const Eigen::Vector3d& x) const {
    switch (model) {
        case Model::UnitDisk: return radius - std::hypot(x.x(), x.y());
        case Model::Hemisphere: return radius * std::asin(std::clamp(x.z() / radius, -1.0, 1.0));
        case Model::Sphere: return kInf;
    }
    return 0;
}

double Surface::geodesic_distance(const Eigen::Vector3d& p, const Eigen::Vector3d& q) const {
    if (!spherical(model)) return (p - q).norm();
    return radius * std::atan2(p.cross(q).norm(), p.dot(q));
}

Eigen::Vector3d Surface::rotate(const Eigen::Vector3d& x, int k, int times) const {
    const double t = 2.0 * kPi * times / k;
    return {std::cos(t) * x.x() - std::sin(t) * x.y(), std::sin(t) * x.x() + std::cos(t) * x.y(), x.z()};
}

Eigen::Vector3d Surface::random_point(std::mt19937_64& rng, double margin) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> g(0.0, 1.0);
    for (;;) {
        Eigen::Vector3d x;
        if (!spherical(model)) {
            const double r = radius * std::sqrt(u(rng));
            const double t = 2.0 * kPi * u(rng);
            x = {r * std::cos(t), r * std::sin(t), 0.0};
        } else {
            x = {g(rng), g(rng), g(rng)};
            x *= radius / x.norm();
            if (model == Model::Hemisphere) x.z() = std::abs(x.z());
        }
        if (boundary_distance(x) >= margin) return x;
    }
}

CutoffValue cutoff(double t) {
    CutoffValue c;
    if (t <= 1.0) {
        c.value = 1.0;
        return c;
    }
    if (t >= 2.0) return c;
    const double a = 2.0 - t, b = t - 1.0;
    const double e = 1.0 / a - 1.0 / b;
    const double e1 = 1.0 / (a * a) + 1.0 / (b * b);
    const double e2 = 2.0 / (a * a * a) - 2.0 / (b * b * b);
    // sigma = 1 / (1 + e^E), written to stay finite at both ends.
    const double sigma = e > 0 ? std::exp(-e) / (1.0 + std::exp(-e)) : 1.0 / (1.0 + std::exp(e));
    const double s1 = sigma * (1.0 - sigma);
    c.value = sigma;
    c.d1 = -s1 * e1;
    c.d2 = s1 * (1.0 - 2.0 * sigma) * e1 * e1 - s1 * e2;
    if (!std::isfinite(c.d1)) c.d1 = 0;
    if (!std::isfinite(c.d2)) c.d2 = 0;
    return c;
}

Chart::Chart(const Surface& surface, const Eigen::Vector3d& centre, double r0)
    : surface_(surface), centre_(centre), r0_(r0) {
    const double scale = surface.radius;
    if (!surface.contains(centre)) throw std::invalid_argument("chart_at: centre is not on the surface");
    if (surface.has_boundary() && surface.boundary_distance(centre) < 0.02 * scale)
        throw std::invalid_argument("chart_at: centre on or too near the boundary");
    if (!spherical(surface.model)) {
        r_xi_ = surface.radius - std::hypot(centre.x(), centre.y());
        const double rho = std::hypot(centre.x(), centre.y());
        axis_ = rho == 0 ? 1 : 0;
    } else {
        const Eigen::Vector3d u = centre / surface.radius;
        const double rho = std::hypot(u.x(), u.y());
        if (rho == 0 && u.z() > 0) {
            axis_ = 1;
        } else if (rho == 0) {
            axis_ = -1;
            rot_ = Eigen::Vector3d(1, -1, -1).asDiagonal();
        } else {
            rot_ = Eigen::Quaterniond::FromTwoVectors(u, Eigen::Vector3d::UnitZ()).toRotationMatrix();
        }
        r_xi_ = 2.0 * scale;
        if (surface.model == Model::Hemisphere)
            r_xi_ = std::min(r_xi_, 2.0 * scale * std::tan(surface.boundary_distance(centre) / (2.0 * scale)));
    }
    if (r0_ <= 0) r0_ = 0.2 * r_xi_;
    if (!(r0_ < 0.25 * r_xi_)) throw std::invalid_argument("chart_at: cutoff radius must be below r_xi/4");
}

Chart chart_at(const Surface& surface, const Eigen::Vector3d& xi, double r0) { return Chart(surface, xi, r0); }

Eigen::Vector2d Chart::y(const Eigen::Vector3d& x) const {
    if (!spherical(surface_.model)) return (x - centre_).head<2>();
    const Eigen::Vector3d u = rot_ * x / surface_.radius;
    const double n = stereo_norm(u, surface_.radius);
    const double rho = std::hypot(u.x(), u.y());
    if (rho == 0) return u.z() > 0 ? Eigen::Vector2d::Zero() : Eigen::Vector2d(kInf, 0.0);
    return Eigen::Vector2d(u.x(), u.y()) * (n / rho);
}

double Chart::y_norm(const Eigen::Vector3d& x) const {
    if (!spherical(surface_.model)) return (x - centre_).head<2>().norm();
    return stereo_norm(rot_ * x / surface_.radius, surface_.radius);
}

Eigen::Vector3d Chart::x(const Eigen::Vector2d& y) const {
    if (!spherical(surface_.model)) return centre_ + Eigen::Vector3d(y.x(), y.y(), 0.0);
    return rot_.transpose() * (surface_.radius * stereo_inverse(y, surface_.radius));
}

double Chart::conformal(double rho) const {
    if (!spherical(surface_.model)) return 0.0;
    const double a = surface_.radius;
    return -2.0 * std::log1p(rho * rho / (4.0 * a * a));
}

double Chart::log_radius(double s) const {
    if (axis_ == 0) throw std::logic_error("Chart::log_radius: centre is off the axis");
    return axis_ > 0 ? s : 2.0 * surface_.mirror() - s;
}

double Chart::cylinder_s(double sigma) const { return log_radius(sigma); }

std::vector<Eigen::Vector3d> symmetric_centers(const Surface& surface, int k) {
    if (k < 1) throw std::invalid_argument("symmetric_centers: k must be >= 1");
    switch (surface.model) {
        case Model::UnitDisk: return {Eigen::Vector3d::Zero()};
        case Model::Hemisphere: return {Eigen::Vector3d(0, 0, surface.radius)};
        case Model::Sphere:
            return {Eigen::Vector3d(0, 0, surface.radius), Eigen::Vector3d(0, 0, -surface.radius)};
    }
    return {};
}

// ---- Green functions -------------------------------------------------------

namespace {

// Sphere Green function through the chord length.
double sphere_G(double a, const Eigen::Vector3d& x, const Eigen::Vector3d& xi) {
    return -std::log((x - xi).norm()) / (2.0 * kPi) + (std::log(2.0 * a) - 0.5) / (2.0 * kPi);
}

double disk_regular(double R, const Eigen::Vector3d& x, const Eigen::Vector3d& xi) {
    const Eigen::Vector2d xh = x.head<2>() / R, eh = xi.head<2>() / R;
    const double n = eh.norm();
    double image = 0.0;
    if (n > 0) image = std::log((n * xh - eh / n).norm());
    return -image / (2.0 * kPi) + (xh.squaredNorm() + eh.squaredNorm()) / (4.0 * kPi) - 3.0 / (8.0 * kPi);
}

Eigen::Vector3d reflect(const Eigen::Vector3d& x) { return {x.x(), x.y(), -x.z()}; }

}  // namespace

double GreenData::closed_G(const Eigen::Vector3d& x) const {
    const double a = surface_.radius;
    const Eigen::Vector3d& xi = chart_.centre();
    switch (surface_.model) {
        case Model::UnitDisk:
            return -std::log((x - xi).head<2>().norm() / a) / (2.0 * kPi) + disk_regular(a, x, xi);
        case Model::Sphere: return sphere_G(a, x, xi);
        case Model::Hemisphere: return sphere_G(a, x, xi) + sphere_G(a, x, reflect(xi));
    }
    return 0;
}

double GreenData::closed_H(const Eigen::Vector3d& x) const {
    const double a = surface_.radius;
    const Eigen::Vector3d& xi = chart_.centre();
    const double rho = chart_.y_norm(x);
    const double chi = cutoff(rho / chart_.r0()).value;
    if (chi == 0) return closed_G(x);
    const double tail = chi == 1.0 ? 0.0 : (chi - 1.0) * std::log(rho) / (2.0 * kPi);
    if (surface_.model == Model::UnitDisk)
        return disk_regular(a, x, xi) + std::log(a) / (2.0 * kPi) + tail;
    double h = std::log1p(rho * rho / (4.0 * a * a)) / (4.0 * kPi) + (std::log(2.0 * a) - 0.5) / (2.0 * kPi) + tail;
    if (surface_.model == Model::Hemisphere) h += sphere_G(a, x, reflect(xi));
    return h;
}

double GreenData::G(const Eigen::Vector3d& x) const {
    if (method_ == GreenMethod::ClosedForm) return closed_G(x);
    const double rho = chart_.y_norm(x);
    return H(x) - cutoff(rho / chart_.r0()).value * std::log(rho) / (2.0 * kPi);
}

double GreenData::H(const Eigen::Vector3d& x) const {
    if (method_ == GreenMethod::ClosedForm) return closed_H(x);
    const auto [s, theta] = surface_.cylinder(x);
    return grid_->line().interpolate(nodal_h_, s);
}

GreenData green_closed_form(const Surface& surface, const Chart& chart) {
    GreenData g;
    g.surface_ = surface;
    g.chart_ = chart;
    g.method_ = GreenMethod::ClosedForm;
    g.robin_ = g.closed_H(chart.centre());
    return g;
}

GreenData green_numeric(std::shared_ptr<const SurfaceGrid> grid, const Chart& chart) {
    if (chart.axis() == 0) throw std::invalid_argument("green_numeric: centre must lie on the symmetry axis");
    const LineGrid& line = grid->line();
    // Sizing: the cutoff transition [r0, 2r0] must carry enough nodes.
    const double s0 = chart.cylinder_s(std::log(chart.r0()));
    const double s1 = chart.cylinder_s(std::log(2.0 * chart.r0()));
    int inside = 0;
    for (int n = 0; n < line.size(); ++n) {
        const double s = line.nodes()[n];
        if (s >= std::min(s0, s1) && s <= std::max(s0, s1)) ++inside;
    }
    if (inside < 4 * line.degree()) throw std::runtime_error("green_numeric: grid too coarse to resolve the cutoff radius");
    const double lo_sigma = chart.log_radius(chart.axis() > 0 ? line.lo() : line.hi());
    if (lo_sigma > std::log(chart.r0()) - 5.0)
        throw std::runtime_error("green_numeric: grid does not reach inside the cutoff radius");

    const int ns = line.size();
    Eigen::VectorXd cyl(ns), target(ns);
    for (int n = 0; n < ns; ++n) {
        const double sigma = chart.log_radius(line.nodes()[n]);
        const double t = std::exp(sigma) / chart.r0();
        const CutoffValue c = cutoff(t);
        const double cs = t * c.d1;
        const double css = t * c.d1 + t * t * c.d2;
        // Chart part of the regular-part right-hand side; the constant part
        // is supplied by the mean removal in the solver.
        cyl[n] = -(css * sigma + 2.0 * cs) / (2.0 * kPi);
        target[n] = c.value * sigma / (2.0 * kPi);
    }
    PoissonSolver solver(grid);
    const double integral = 2.0 * kPi * grid->measure().dot(target);
    GreenData g;
    g.surface_ = grid->surface();
    g.chart_ = chart;
    g.method_ = GreenMethod::Numeric;
    g.grid_ = grid;
    g.nodal_h_ = solver.solve_density(cyl, integral);
    g.robin_ = g.nodal_h_[chart.axis() > 0 ? 0 : ns - 1];
    return g;
}

// ---- grids and the Poisson solver ------------------------------------------

SurfaceGrid::SurfaceGrid(const Surface& surface, LineGrid line, AngularGrid angular)
    : surface_(surface), line_(std::move(line)), angular_(std::move(angular)) {
    const int n = line_.size();
    psi_.resize(n);
    measure_.resize(n);
    for (int i = 0; i < n; ++i) {
        psi_[i] = surface_.psi(line_.nodes()[i]);
        measure_[i] = line_.weights()[i] * std::exp(psi_[i]);
    }
    area_ = 2.0 * kPi * measure_.sum();
}

double SurfaceGrid::integrate(const Field& f) const {
    if (f.rows() != ns()) throw std::invalid_argument("SurfaceGrid::integrate: row count mismatch");
    return 2.0 * kPi * measure_.dot(f.rowwise().sum()) / static_cast<double>(f.cols());
}

double SurfaceGrid::integrate_density(const Eigen::VectorXd& cyl) const {
    return 2.0 * kPi * line_.weights().dot(cyl);
}

Field SurfaceGrid::subtract_mean(const Field& f) const { return f.array() - mean(f); }

double SurfaceGrid::lp_norm(const Field& f, double p) const {
    if (!(p >= 1)) throw std::invalid_argument("lp_norm: p must be >= 1");
    return std::pow(integrate(f.array().abs().pow(p).matrix()), 1.0 / p);
}

Eigen::Vector3d SurfaceGrid::point(int n, int m) const {
    return surface_.point(line_.nodes()[n], nt() == 1 ? 0.0 : angular_.theta(m));
}

Field SurfaceGrid::broadcast(const Eigen::VectorXd& radial) const { return radial.replicate(1, nt()); }

std::shared_ptr<SurfaceGrid> make_surface_grid(const Surface& surface, const std::vector<double>& centres,
                                               const LineGridSpec& spec, const AngularGrid& angular,
                                               double tail, const std::vector<RefineWindow>& extra) {
    if (centres.empty()) throw std::invalid_argument("make_surface_grid: no refinement centres");
    const double cmin = *std::min_element(centres.begin(), centres.end());
    const double cmax = *std::max_element(centres.begin(), centres.end());
    double lo = cmin - tail, hi = surface.s_max();
    if (surface.model == Model::Sphere) {
        lo = std::min(lo, 2.0 * surface.mirror() - (cmax + tail));
        hi = 2.0 * surface.mirror() - lo;
    }
    std::vector<double> inside;
    for (double c : centres)
        if (c > lo && c < hi) inside.push_back(c);
    return std::make_shared<SurfaceGrid>(surface, LineGrid::graded(lo, hi, inside, spec, extra), angular);
}

RefineWindow cutoff_window(const Chart& chart, const LineGridSpec& spec) {
    const double a = chart.cylinder_s(std::log(chart.r0()));
    const double b = chart.cylinder_s(std::log(2.0 * chart.r0()));
    return {std::min(a, b), std::max(a, b), spec.h_cutoff};
}

PoissonSolver::PoissonSolver(std::shared_ptr<const SurfaceGrid> grid) : grid_(std::move(grid)) {
    stiffness_ = grid_->line().stiffness();
    const int ns = grid_->ns();
    const auto& modes = grid_->angular().modes();
    const Eigen::VectorXd& m = grid_->line().weights();
    const Eigen::VectorXd& mu = grid_->measure();
    for (int l : modes) {
        std::vector<Eigen::Triplet<double>> trip;
        for (int c = 0; c < stiffness_.outerSize(); ++c)
            for (Eigen::SparseMatrix<double>::InnerIterator it(stiffness_, c); it; ++it)
                trip.emplace_back(it.row(), it.col(), it.value());
        int size = ns;
        if (l == 0) {
            for (int n = 0; n < ns; ++n) {
                trip.emplace_back(n, ns, mu[n]);
                trip.emplace_back(ns, n, mu[n]);
            }
            size = ns + 1;
        } else {
            for (int n = 0; n < ns; ++n) trip.emplace_back(n, n, double(l) * l * m[n]);
        }
        Eigen::SparseMatrix<double> A(size, size);
        A.setFromTriplets(trip.begin(), trip.end());
        auto lu = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
        lu->compute(A);
        if (lu->info() != Eigen::Success) throw std::runtime_error("PoissonSolver: factorisation failed");
        lu_.push_back(std::move(lu));
    }
}

const Eigen::SparseLU<Eigen::SparseMatrix<double>>& PoissonSolver::factor(int q) const { return *lu_[q]; }

Eigen::VectorXd PoissonSolver::solve_density(const Eigen::VectorXd& cyl, double integral) const {
    const int ns = grid_->ns();
    const Eigen::VectorXd& mu = grid_->measure();
    Eigen::VectorXd b(ns + 1);
    b.head(ns) = grid_->line().weights().cwiseProduct(cyl);
    b.head(ns) -= (b.head(ns).sum() / mu.sum()) * mu;
    b[ns] = integral / (2.0 * kPi);
    Eigen::VectorXd x = factor(0).solve(b);
    return x.head(ns);
}

Field PoissonSolver::solve(const Field& g) const {
    const int ns = grid_->ns();
    const Eigen::ArrayXd ep = grid_->psi().array().exp();
    if (g.cols() == 1) return solve_density((g.col(0).array() * ep).matrix());
    const AngularGrid& ang = grid_->angular();
    Eigen::MatrixXd c = ang.analyse(g);
    const Eigen::VectorXd& m = grid_->line().weights();
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(ns, c.cols());
    u.col(0) = solve_density((c.col(0).array() * ep).matrix());
    for (std::size_t q = 1; q < ang.modes().size(); ++q)
        for (int part = 0; part < 2; ++part) {
            const int col = 2 * static_cast<int>(q) + part;
            Eigen::VectorXd rhs = m.cwiseProduct((c.col(col).array() * ep).matrix());
            u.col(col) = factor(static_cast<int>(q)).solve(rhs);
        }
    return ang.synthesise(u, ns);
}

}  // namespace toda
