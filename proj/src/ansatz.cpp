#include "toda/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace toda {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

Potential Potential::constant(double c) {
    if (!(c > 0)) throw std::invalid_argument("Potential: constant must be positive");
    Potential p;
    p.c_ = c;
    return p;
}

Potential Potential::ripple(double c, double eta, int order, double scale) {
    if (!(c > 0)) throw std::invalid_argument("Potential: constant must be positive");
    if (!(std::abs(eta) < 1)) throw std::invalid_argument("Potential: ripple amplitude must be below 1");
    if (order < 1) throw std::invalid_argument("Potential: ripple order must be positive");
    Potential p;
    p.c_ = c;
    p.eta_ = eta;
    p.order_ = order;
    p.scale_ = scale;
    return p;
}

double Potential::operator()(const Eigen::Vector3d& x) const {
    if (radial()) return c_;
    const double rho = std::hypot(x.x(), x.y()) / scale_;
    return c_ * (1.0 + eta_ * std::pow(rho, order_) * std::cos(order_ * std::atan2(x.y(), x.x())));
}

std::string Potential::describe() const {
    std::ostringstream os;
    os << c_;
    if (!radial()) os << "*(1+" << eta_ << "*r^" << order_ << "*cos(" << order_ << "t))";
    return os.str();
}

BlowupConfig make_config(Family family, int rank, Model model, bool normalized, int m, double eps, int k) {
    BlowupConfig c;
    c.cartan = build_cartan(family, rank);
    c.surface = make_surface(model, normalized);
    c.k = k > 0 ? k : c.cartan.alpha.back() / 2 + 1;
    const auto centres = symmetric_centers(c.surface, c.k);
    if (m < 1 || m > static_cast<int>(centres.size()))
        throw std::invalid_argument("make_config: the surface has fewer symmetric centres than requested");
    c.points.assign(centres.begin(), centres.begin() + m);
    c.potentials.assign(rank, Potential::constant(1.0));
    c.eps = eps;
    return c;
}

void validate(const BlowupConfig& c) {
    const int n = c.cartan.rank;
    if (n < 2) throw std::invalid_argument("config: rank must be at least 2");
    if (!(c.eps > 0 && c.eps < 1)) throw std::invalid_argument("config: eps must lie in (0, 1)");
    if (c.require_symmetry_order && 2 * c.k <= c.cartan.alpha.back())
        throw std::invalid_argument("config: symmetry order k must exceed alpha_N / 2");
    if (c.points.empty()) throw std::invalid_argument("config: no blow-up points");
    const auto centres = symmetric_centers(c.surface, c.k);
    for (std::size_t j = 0; j < c.points.size(); ++j) {
        bool found = false;
        for (const auto& z : centres) found = found || (z - c.points[j]).norm() < 1e-12;
        if (!found) throw std::invalid_argument("config: blow-up point is not a symmetric centre");
        for (std::size_t l = 0; l < j; ++l)
            if ((c.points[l] - c.points[j]).norm() < 1e-12)
                throw std::invalid_argument("config: blow-up points must be distinct");
    }
    if (static_cast<int>(c.potentials.size()) != n)
        throw std::invalid_argument("config: need one potential per component");
    bool radial = true;
    for (const auto& v : c.potentials) {
        radial = radial && v.radial();
        if (!v.radial() && v.order() % c.k != 0)
            throw std::invalid_argument("config: potential is not invariant under the 2 pi / k rotation");
    }
    if (c.ntheta < 1) throw std::invalid_argument("config: ntheta must be positive");
    if (!radial && c.ntheta == 1) throw std::invalid_argument("config: angular potentials need ntheta > 1");
    if (c.ntheta > 1 && c.ntheta % c.k != 0)
        throw std::invalid_argument("config: ntheta must be a multiple of k for a symmetric grid");
    if (!(c.d_factor > 0)) throw std::invalid_argument("config: d_factor must be positive");
    if (!(c.p >= 1)) throw std::invalid_argument("config: p must be at least 1");
    // Charts of radius 4 r0 around distinct points must not meet.
    std::vector<Chart> charts;
    for (const auto& x : c.points) charts.push_back(chart_at(c.surface, x, c.r0));
    for (std::size_t j = 0; j < charts.size(); ++j)
        for (std::size_t l = 0; l < j; ++l) {
            auto geo = [&](const Chart& ch) {
                if (c.surface.model == Model::UnitDisk) return 4.0 * ch.r0();
                return 2.0 * c.surface.radius * std::atan(4.0 * ch.r0() / (2.0 * c.surface.radius));
            };
            if (geo(charts[j]) + geo(charts[l]) >= c.surface.geodesic_distance(c.points[j], c.points[l]))
                throw std::invalid_argument("config: charts around distinct points overlap");
        }
}

std::vector<double> refinement_centres(const BlowupConfig& config, const std::vector<Chart>& charts,
                                       const Eigen::MatrixXd& delta) {
    std::vector<double> out;
    const int n = config.cartan.rank;
    for (std::size_t j = 0; j < charts.size(); ++j) {
        const Chart& ch = charts[j];
        for (int i = 0; i < n; ++i) {
            out.push_back(ch.cylinder_s(std::log(delta(i, j))));
            if (i + 1 < n) out.push_back(ch.cylinder_s(0.5 * (std::log(delta(i, j)) + std::log(delta(i + 1, j)))));
        }
        out.push_back(ch.cylinder_s(std::log(ch.r0())));
    }
    return out;
}

Ansatz assemble_ansatz(const BlowupConfig& config) {
    validate(config);
    Ansatz a;
    a.config = config;
    const int n = config.cartan.rank;
    const int m = static_cast<int>(config.points.size());
    for (const auto& x : config.points) a.charts.push_back(chart_at(config.surface, x, config.r0));

    std::vector<RefineWindow> windows;
    for (const auto& ch : a.charts) windows.push_back(cutoff_window(ch, config.spec));

    if (config.green == GreenMethod::Numeric) {
        std::vector<double> cs;
        for (const auto& ch : a.charts) cs.push_back(ch.cylinder_s(std::log(ch.r0())));
        auto g = make_surface_grid(config.surface, cs, config.spec, AngularGrid(1, 1), config.tail, windows);
        for (const auto& ch : a.charts) a.greens.push_back(green_numeric(g, ch));
    } else {
        for (const auto& ch : a.charts) a.greens.push_back(green_closed_form(config.surface, ch));
    }

    Eigen::VectorXd robin(m), mass = Eigen::VectorXd::Constant(m, kInteriorMass);
    Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(m, m), pot(n, m);
    for (int j = 0; j < m; ++j) {
        robin[j] = a.greens[j].robin();
        for (int l = 0; l < m; ++l)
            if (l != j) cross(l, j) = a.greens[j].G(config.points[l]);
        for (int i = 0; i < n; ++i) pot(i, j) = config.potentials[i](config.points[j]);
    }
    a.dcoef = solve_d_coefficients(config.cartan, robin, cross, pot, mass);
    const Eigen::MatrixXd d = a.dcoef.d * config.d_factor;
    a.delta = delta_values(config.cartan, d, config.eps);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i + 1 < n; ++i)
            if (!(a.delta(i, j) < a.delta(i + 1, j)))
                throw std::invalid_argument("config: eps too large, concentration scales are not ordered");
    a.annulus_inner.resize(n, m);
    a.annulus_outer.resize(n, m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) {
            a.annulus_inner(i, j) = i == 0 ? 0.0 : std::sqrt(a.delta(i - 1, j) * a.delta(i, j));
            a.annulus_outer(i, j) = i + 1 == n ? kInf : std::sqrt(a.delta(i, j) * a.delta(i + 1, j));
        }

    a.grid = make_surface_grid(config.surface, refinement_centres(config, a.charts, a.delta), config.spec,
                               AngularGrid(config.k, config.ntheta), config.tail, windows);
    a.solver = std::make_shared<PoissonSolver>(a.grid);
    a.pu.assign(n, {});
    a.source.assign(n, {});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            const int al = config.cartan.alpha[i];
            a.source[i].push_back(bubble_source(*a.grid, a.charts[j], al, a.delta(i, j)));
            a.pu[i].push_back(project_bubble(*a.solver, a.charts[j], al, a.delta(i, j)));
        }
    for (int i = 0; i < n; ++i) {
        Field w = Field::Zero(a.grid->ns(), a.grid->nt());
        for (int l = 0; l < n; ++l) {
            const double c = l == i ? 1.0 : 0.5 * config.cartan.a[i][l];
            if (c == 0) continue;
            for (int j = 0; j < m; ++j) w += c * a.pu[l][j].values;
        }
        a.W.push_back(w);
        const Potential& v = config.potentials[i];
        a.log_potential.push_back(a.grid->sample([&](const Eigen::Vector3d& x) { return std::log(v(x)); }));
    }
    return a;
}

Field Ansatz::bubble_density(int i) const {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(grid->ns());
    for (const auto& c : source[i]) s += c;
    return grid->broadcast(s);
}

Field Ansatz::bubble_pointwise(int i) const {
    const Eigen::ArrayXd inv = (-grid->psi().array()).exp();
    Eigen::VectorXd s = Eigen::VectorXd::Zero(grid->ns());
    for (const auto& c : source[i]) s += (c.array() * inv).matrix();
    return grid->broadcast(s);
}

Field Ansatz::exp_density(int i, const Field* phi) const {
    Field e = W[i] + log_potential[i];
    e.colwise() += grid->psi();
    if (phi) e += *phi;
    return (e.array() + std::log(2.0 * config.eps)).exp().matrix();
}

Field Ansatz::exp_pointwise(int i, const Field* phi) const {
    Field e = W[i] + log_potential[i];
    if (phi) e += *phi;
    return (e.array() + std::log(2.0 * config.eps)).exp().matrix();
}

double lp_norm(const SurfaceGrid& grid, const Field& f, double p) { return grid.lp_norm(f, p); }

ResidualReport residual(const Ansatz& a, double p) {
    const int n = a.N();
    ResidualReport r;
    std::vector<Field> diff;
    for (int i = 0; i < n; ++i) diff.push_back(a.exp_pointwise(i) - a.bubble_pointwise(i));
    for (int i = 0; i < n; ++i) {
        Field d = Field::Zero(a.grid->ns(), a.grid->nt());
        for (int l = 0; l < n; ++l) d += 0.5 * a.config.cartan.a[i][l] * diff[l];
        Field ri = a.grid->subtract_mean(d);
        r.means.push_back(a.grid->integrate(ri));
        r.norms.push_back(lp_norm(*a.grid, ri, p));
        r.total += r.norms.back();
        r.R.push_back(std::move(ri));
        r.difference_norms.push_back(lp_norm(*a.grid, diff[i], p));
    }
    r.difference = std::move(diff);
    return r;
}

double theta_at(const Ansatz& a, int i, int j, const Eigen::Vector2d& y) {
    const auto& cd = a.config.cartan;
    const int n = a.N();
    const Chart& ch = a.charts[j];
    const double rho = a.delta(i, j) * y.norm();
    const Eigen::Vector3d x = ch.x(a.delta(i, j) * y);
    double t = ch.conformal(rho);
    for (int l = 0; l < n; ++l) {
        const double c = l == i ? 1.0 : 0.5 * cd.a[i][l];
        if (c == 0) continue;
        for (int jj = 0; jj < a.m(); ++jj) {
            const Chart& cj = a.charts[jj];
            const double r = cj.y_norm(x);
            const double chi = cutoff(r / cj.r0()).value;
            double pu = 0.5 * cd.alpha[l] * kInteriorMass * a.greens[jj].H(x);
            if (chi > 0) pu -= 2.0 * chi * log_bubble_denominator(cd.alpha[l], std::log(a.delta(l, jj)), std::log(r));
            t += c * pu;
        }
    }
    const int al = cd.alpha[i];
    const double ld = std::log(a.delta(i, j));
    const double u = std::log(2.0 * al * al) + al * ld - 2.0 * log_bubble_denominator(al, ld, std::log(rho));
    t -= u;
    t += std::log(a.config.potentials[i](x)) + std::log(2.0 * a.config.eps) - (al - 2) * std::log(rho);
    return t;
}

ThetaReport theta(const Ansatz& a, int i, int j, int nradii, int nangles) {
    ThetaReport rep;
    rep.i = i;
    rep.j = j;
    const double d = a.delta(i, j);
    const double lim = 0.999 * a.charts[j].r_xi() / d;
    rep.inner = a.annulus_inner(i, j) / d;
    rep.outer = std::min(a.annulus_outer(i, j) / d, lim);
    const double lo = rep.inner > 0 ? rep.inner : std::min(1e-4, 1e-2 * rep.outer);
    const double floor = std::pow(a.config.eps, 1.0 / (2.0 * (i + 1)));
    for (int q = 0; q < nradii; ++q) {
        const double r = std::exp(std::log(lo) + (std::log(rep.outer) - std::log(lo)) * q / (nradii - 1));
        for (int k = 0; k < nangles; ++k) {
            const double th = 2.0 * kPi * k / nangles;
            const double v = std::abs(theta_at(a, i, j, Eigen::Vector2d(r * std::cos(th), r * std::sin(th))));
            rep.sup_abs = std::max(rep.sup_abs, v);
            rep.sup_ratio = std::max(rep.sup_ratio, v / (d * r + floor));
        }
    }
    rep.at_unit = theta_at(a, i, j, Eigen::Vector2d(1.0, 0.0));
    return rep;
}

}  // namespace toda
