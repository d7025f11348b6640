#include "toda/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace toda {

QuadResult integrate_panels(const std::function<double(double)>& f,
                            const std::vector<double>& breaks) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    QuadResult out;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        double err = 0.0;
        // max_depth = 0: a single non-adaptive panel, err = |K15 - G7|.
        out.value += GK::integrate(f, breaks[i], breaks[i + 1], 0, 0.0, &err);
        out.error += err;
    }
    return out;
}

QuadResult integrate(const std::function<double(double)>& f, double a, double b, double h) {
    if (!(b > a)) return {};
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / h - 1e-12)));
    std::vector<double> br(n + 1);
    for (int i = 0; i <= n; ++i) br[i] = a + (b - a) * i / n;
    br[n] = b;
    return integrate_panels(f, br);
}

QuadResult planar_radial_integral(const std::function<double(double)>& g,
                                  const std::vector<double>& scales, double rmax,
                                  int per_decade) {
    if (scales.empty()) throw std::invalid_argument("planar_radial_integral: no scales");
    const double smin = *std::min_element(scales.begin(), scales.end());
    const double smax = *std::max_element(scales.begin(), scales.end());
    if (!(smin > 0)) throw std::invalid_argument("planar_radial_integral: scales must be positive");
    const double lo = std::log(smin) - 12.0 * std::numbers::ln10;
    double hi = std::isfinite(rmax) ? std::log(rmax) : std::log(smax) + 12.0 * std::numbers::ln10;
    if (hi <= lo) return {};
    const double h = std::numbers::ln10 / per_decade;
    auto integrand = [&](double s) {
        const double r = std::exp(s);
        return 2.0 * std::numbers::pi * g(r) * r * r;
    };
    return integrate(integrand, lo, hi, h);
}

RateFit loglog_rate_fit(const std::vector<std::pair<double, double>>& xy) {
    if (xy.size() < 3) throw std::invalid_argument("loglog_rate_fit: need at least three points");
    RateFit fit;
    for (const auto& [x, y] : xy) {
        if (!(x > 0) || !(y > 0)) throw std::invalid_argument("loglog_rate_fit: values must be positive");
        fit.log_x.push_back(std::log(x));
        fit.log_y.push_back(std::log(y));
    }
    const double n = static_cast<double>(xy.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xy.size(); ++i) {
        mx += fit.log_x[i];
        my += fit.log_y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xy.size(); ++i) {
        sxx += (fit.log_x[i] - mx) * (fit.log_x[i] - mx);
        sxy += (fit.log_x[i] - mx) * (fit.log_y[i] - my);
    }
    if (sxx == 0) throw std::invalid_argument("loglog_rate_fit: abscissae coincide");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < xy.size(); ++i) {
        const double d = fit.log_y[i] - (fit.intercept + fit.slope * fit.log_x[i]);
        ss += d * d;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

namespace {

// Legendre P_n and P_{n-1} at x by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
    double p0 = 1.0, p1 = x;
    if (n == 0) return {1.0, 0.0};
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    return {p1, p0};
}

}  // namespace

GllRule gll_rule(int p) {
    if (p < 1) throw std::invalid_argument("gll_rule: degree must be >= 1");
    GllRule r;
    r.degree = p;
    r.nodes.resize(p + 1);
    r.weights.resize(p + 1);
    for (int j = 0; j <= p; ++j) {
        double x = -std::cos(std::numbers::pi * j / p);
        if (j > 0 && j < p) {
            for (int it = 0; it < 100; ++it) {
                auto [pn, pm] = legendre(p, x);
                const double dx = (x * pn - pm) / ((p + 1) * pn);
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
        }
        r.nodes(j) = x;
        const double pn = legendre(p, x).first;
        r.weights(j) = 2.0 / (p * (p + 1.0) * pn * pn);
    }
    r.diff.setZero(p + 1, p + 1);
    Eigen::VectorXd pn(p + 1);
    for (int j = 0; j <= p; ++j) pn(j) = legendre(p, r.nodes(j)).first;
    for (int a = 0; a <= p; ++a)
        for (int b = 0; b <= p; ++b)
            if (a != b) r.diff(a, b) = pn(a) / (pn(b) * (r.nodes(a) - r.nodes(b)));
    r.diff(0, 0) = -p * (p + 1.0) / 4.0;
    r.diff(p, p) = p * (p + 1.0) / 4.0;
    return r;
}

LineGrid::LineGrid(std::vector<double> breaks, int degree)
    : breaks_(std::move(breaks)), rule_(gll_rule(degree)) {
    if (breaks_.size() < 2) throw std::invalid_argument("LineGrid: need at least one element");
    for (std::size_t i = 0; i + 1 < breaks_.size(); ++i)
        if (!(breaks_[i + 1] > breaks_[i]))
            throw std::invalid_argument("LineGrid: breakpoints must increase");
    const int p = degree;
    const int ne = elements();
    nodes_.setZero(ne * p + 1);
    weights_.setZero(ne * p + 1);
    for (int e = 0; e < ne; ++e) {
        const double a = breaks_[e], b = breaks_[e + 1], jac = 0.5 * (b - a);
        for (int l = 0; l <= p; ++l) {
            nodes_(node(e, l)) = a + jac * (rule_.nodes(l) + 1.0);
            weights_(node(e, l)) += jac * rule_.weights(l);
        }
        nodes_(node(e, 0)) = a;
        nodes_(node(e, p)) = b;
    }
}

LineGrid LineGrid::graded(double lo, double hi, const std::vector<double>& centres,
                          const LineGridSpec& spec, const std::vector<RefineWindow>& extra) {
    if (!(hi > lo)) throw std::invalid_argument("LineGrid::graded: empty interval");
    if (!(spec.h_fine > 0) || !(spec.h_coarse >= spec.h_fine))
        throw std::invalid_argument("LineGrid::graded: need 0 < h_fine <= h_coarse");
    std::vector<RefineWindow> win;
    for (double c : centres) win.push_back({c - spec.fine_halfwidth, c + spec.fine_halfwidth, spec.h_fine});
    for (const auto& w : extra) {
        if (!(w.h > 0)) throw std::invalid_argument("LineGrid::graded: window spacing must be positive");
        win.push_back(w);
    }
    // Target spacing is piecewise constant between window edges.
    std::vector<double> edges{lo, hi};
    for (const auto& w : win)
        for (double e : {w.lo, w.hi})
            if (e > lo && e < hi) edges.push_back(e);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    std::vector<double> br{lo};
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        const double a = edges[k], b = edges[k + 1], mid = 0.5 * (a + b);
        double h = spec.h_coarse;
        for (const auto& w : win)
            if (mid >= w.lo && mid <= w.hi) h = std::min(h, w.h);
        const int n = std::max(1, static_cast<int>(std::ceil((b - a) / h - 1e-9)));
        for (int i = 1; i <= n; ++i) br.push_back(a + (b - a) * i / n);
        br.back() = b;
    }
    // Drop slivers left over by window edges.
    double hmin = spec.h_fine;
    for (const auto& w : win) hmin = std::min(hmin, w.h);
    const double min_len = 0.2 * hmin;
    std::vector<double> clean{br.front()};
    for (std::size_t i = 1; i < br.size(); ++i) {
        if (br[i] - clean.back() < min_len && i + 1 < br.size()) continue;
        if (br[i] - clean.back() < min_len && clean.size() > 1) clean.back() = br[i];
        else clean.push_back(br[i]);
    }
    return LineGrid(clean, spec.degree);
}

Eigen::SparseMatrix<double> LineGrid::stiffness() const {
    const int p = rule_.degree;
    const Eigen::MatrixXd ref = rule_.diff.transpose() * rule_.weights.asDiagonal() * rule_.diff;
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(elements()) * (p + 1) * (p + 1));
    for (int e = 0; e < elements(); ++e) {
        const double jac = 0.5 * (breaks_[e + 1] - breaks_[e]);
        for (int a = 0; a <= p; ++a)
            for (int b = 0; b <= p; ++b) t.emplace_back(node(e, a), node(e, b), ref(a, b) / jac);
    }
    Eigen::SparseMatrix<double> k(size(), size());
    k.setFromTriplets(t.begin(), t.end());
    return k;
}

Eigen::VectorXd LineGrid::derivative(const Eigen::VectorXd& u) const {
    const int p = rule_.degree;
    Eigen::VectorXd du = Eigen::VectorXd::Zero(size());
    Eigen::VectorXd count = Eigen::VectorXd::Zero(size());
    for (int e = 0; e < elements(); ++e) {
        const double jac = 0.5 * (breaks_[e + 1] - breaks_[e]);
        const Eigen::VectorXd loc = u.segment(node(e, 0), p + 1);
        const Eigen::VectorXd d = rule_.diff * loc / jac;
        for (int a = 0; a <= p; ++a) {
            du(node(e, a)) += d(a);
            count(node(e, a)) += 1.0;
        }
    }
    return du.cwiseQuotient(count);
}

double LineGrid::derivative_lo(const Eigen::VectorXd& u) const {
    const int p = rule_.degree;
    const double jac = 0.5 * (breaks_[1] - breaks_[0]);
    return rule_.diff.row(0).dot(u.segment(0, p + 1)) / jac;
}

double LineGrid::derivative_hi(const Eigen::VectorXd& u) const {
    const int p = rule_.degree;
    const int e = elements() - 1;
    const double jac = 0.5 * (breaks_[e + 1] - breaks_[e]);
    return rule_.diff.row(p).dot(u.segment(node(e, 0), p + 1)) / jac;
}

int LineGrid::element_of(double s) const {
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), s);
    int e = static_cast<int>(it - breaks_.begin()) - 1;
    return std::clamp(e, 0, elements() - 1);
}

double LineGrid::interpolate_in(const Eigen::VectorXd& u, int e, double xi) const {
    const int p = rule_.degree;
    // Barycentric Lagrange interpolation on the reference nodes.
    double num = 0, den = 0;
    for (int b = 0; b <= p; ++b) {
        const double dx = xi - rule_.nodes(b);
        if (std::abs(dx) < 1e-15) return u(node(e, b));
        double lam = 1.0;
        for (int c = 0; c <= p; ++c)
            if (c != b) lam /= (rule_.nodes(b) - rule_.nodes(c));
        num += lam / dx * u(node(e, b));
        den += lam / dx;
    }
    return num / den;
}

double LineGrid::interpolate(const Eigen::VectorXd& u, double s) const {
    s = std::clamp(s, lo(), hi());
    const int e = element_of(s);
    const double a = breaks_[e], b = breaks_[e + 1];
    return interpolate_in(u, e, 2.0 * (s - a) / (b - a) - 1.0);
}

double LineGrid::integral_to(const Eigen::VectorXd& u, double s) const {
    s = std::clamp(s, lo(), hi());
    const int p = rule_.degree;
    const int e = element_of(s);
    double total = 0.0;
    for (int f = 0; f < e; ++f) {
        const double jac = 0.5 * (breaks_[f + 1] - breaks_[f]);
        for (int a = 0; a <= p; ++a) total += jac * rule_.weights(a) * u(node(f, a));
    }
    const double a = breaks_[e], b = breaks_[e + 1];
    if (s > a) {
        auto g = [&](double t) { return interpolate_in(u, e, 2.0 * (t - a) / (b - a) - 1.0); };
        total += boost::math::quadrature::gauss<double, 20>::integrate(g, a, s);
    }
    return total;
}

double LineGrid::min_node_density() const {
    double best = std::numeric_limits<double>::infinity();
    for (int e = 0; e < elements(); ++e)
        best = std::min(best, rule_.degree / (breaks_[e + 1] - breaks_[e]));
    return best;
}

AngularGrid::AngularGrid(int k, int ntheta) : k_(k), ntheta_(ntheta) {
    if (k < 1) throw std::invalid_argument("AngularGrid: k must be >= 1");
    if (ntheta < 1) throw std::invalid_argument("AngularGrid: need at least one sample");
    modes_.push_back(0);
    if (ntheta > 1)
        for (int l = k; 2 * l < ntheta; l += k) modes_.push_back(l);
}

double AngularGrid::theta(int m) const { return 2.0 * std::numbers::pi * m / ntheta_; }

Eigen::MatrixXd AngularGrid::analyse(const Eigen::MatrixXd& f) const {
    const int nm = static_cast<int>(modes_.size());
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(f.rows(), 2 * nm);
    if (ntheta_ == 1) {
        c.col(0) = f.col(0);
        return c;
    }
    for (int q = 0; q < nm; ++q) {
        const int l = modes_[q];
        for (int m = 0; m < ntheta_; ++m) {
            const double t = l * theta(m);
            if (l == 0) {
                c.col(0) += f.col(m) / ntheta_;
            } else {
                c.col(2 * q) += (2.0 / ntheta_) * std::cos(t) * f.col(m);
                c.col(2 * q + 1) += (2.0 / ntheta_) * std::sin(t) * f.col(m);
            }
        }
    }
    return c;
}

Eigen::MatrixXd AngularGrid::synthesise(const Eigen::MatrixXd& c, int rows) const {
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(rows, ntheta_);
    const int nm = static_cast<int>(modes_.size());
    for (int m = 0; m < ntheta_; ++m) {
        f.col(m) = c.col(0);
        for (int q = 1; q < nm; ++q) {
            const double t = modes_[q] * theta(m);
            f.col(m) += std::cos(t) * c.col(2 * q) + std::sin(t) * c.col(2 * q + 1);
        }
    }
    return f;
}

double AngularGrid::rotation_defect(const Eigen::MatrixXd& f) const {
    if (f.cols() == 1) return 0.0;
    if (f.cols() % k_ != 0) return std::numeric_limits<double>::infinity();
    const int shift = static_cast<int>(f.cols()) / k_;
    double d = 0.0;
    for (int m = 0; m < f.cols(); ++m)
        d = std::max(d, (f.col((m + shift) % f.cols()) - f.col(m)).cwiseAbs().maxCoeff());
    return d;
}

}  // namespace toda
