#include "toda/linop.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace toda {

namespace {
constexpr double kPi = std::numbers::pi;

double sech2(double x) {
    const double c = std::cosh(x);
    return std::isinf(c) ? 0.0 : 1.0 / (c * c);
}

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// r^2 times the limit potential at sigma = log r.
double scaled_potential(int alpha, double sigma) { return 0.5 * alpha * alpha * sech2(0.5 * alpha * sigma); }
}  // namespace

double limit_potential(int alpha, double r) {
    const double ra = std::pow(r, alpha);
    return 2.0 * alpha * alpha * std::pow(r, alpha - 2) / ((1 + ra) * (1 + ra));
}

double KernelFunctions::phi0(double r) const {
    if (std::isinf(r)) return -1.0;
    return -std::tanh(0.5 * alpha * std::log(r));
}

double KernelFunctions::angular_profile(double r) const {
    if (r == 0 || std::isinf(r)) return 0.0;
    return 0.5 / std::cosh(0.5 * alpha * std::log(r));
}

double KernelFunctions::phi1(double r, double theta) const {
    return angular_profile(r) * std::cos(0.5 * alpha * theta);
}

double KernelFunctions::phi2(double r, double theta) const {
    return angular_profile(r) * std::sin(0.5 * alpha * theta);
}

KernelFunctions kernel_functions(int alpha) {
    if (alpha < 2 || alpha % 2 != 0) throw std::invalid_argument("kernel_functions: alpha must be even and >= 2");
    return KernelFunctions{alpha};
}

double limit_operator_residual(int alpha, int mode, const std::function<double(double)>& profile,
                               double h, double halfwidth) {
    const int n = static_cast<int>(std::llround(2 * halfwidth / h));
    std::vector<double> f(n + 1);
    for (int q = 0; q <= n; ++q) f[q] = profile(-halfwidth + q * h);
    double sup = 0;
    for (int q = 1; q < n; ++q) {
        const double s = -halfwidth + q * h;
        const double r = (-f[q + 1] + 2 * f[q] - f[q - 1]) / (h * h) + double(mode) * mode * f[q] -
                         scaled_potential(alpha, s) * f[q];
        sup = std::max(sup, std::abs(r));
    }
    return sup;
}

double limit_rayleigh_quotient(int alpha, int mode, const std::function<double(double)>& profile,
                               double h, double halfwidth) {
    const int n = static_cast<int>(std::llround(2 * halfwidth / h));
    double energy = 0, pot = 0;
    for (int q = 0; q < n; ++q) {
        const double a = -halfwidth + q * h, b = a + h, c = a + 0.5 * h;
        const double fa = profile(a), fb = profile(b), fc = profile(c);
        const double d = (fb - fa) / h;
        energy += h * (d * d + double(mode) * mode * fc * fc);
        pot += h * scaled_potential(alpha, c) * fc * fc;
    }
    return (energy - pot) / energy;
}

std::array<QuadResult, 3> quadrature_identities(int alpha) {
    const double half = 0.5 * alpha;
    const double lim = 80.0 / alpha;
    auto weighted = [&](auto w) {
        return integrate(
            [&, w](double s) { return 2 * kPi * scaled_potential(alpha, s) * (-std::tanh(half * s)) * w(s); },
            -lim, lim, 0.25);
    };
    return {weighted([](double) { return 1.0; }),
            weighted([alpha](double s) { return softplus(alpha * s); }),
            weighted([](double s) { return s; })};
}

QuadResult limit_potential_mass(int alpha) {
    const double lim = 80.0 / alpha;
    return integrate([alpha](double s) { return 2 * kPi * scaled_potential(alpha, s); }, -lim, lim, 0.25);
}

Eigen::MatrixXd symmetric_projection(const AngularGrid& grid, const Eigen::MatrixXd& samples) {
    return grid.synthesise(grid.analyse(samples), static_cast<int>(samples.rows()));
}

bool mode_retained(const AngularGrid& grid, int mode) {
    for (int l : grid.modes())
        if (l == mode) return true;
    return false;
}

long long coupling_nondegeneracy(const CartanData& cd) {
    const int n = cd.rank;
    return 2LL * n - static_cast<long long>(cd.a[n - 2][n - 1]) * cd.a[n - 1][n - 2] * (n - 1);
}

LinearizedSystem::LinearizedSystem(const Ansatz& a) : grid_(a.grid), n_(a.N()) {
    stiffness_ = grid_->line().stiffness();
    const int ns = grid_->ns();
    const Eigen::VectorXd& w = grid_->line().weights();
    const Eigen::ArrayXd inv = (-grid_->psi().array()).exp();
    coupling_.assign(n_, std::vector<double>(n_, 0.0));
    for (int i = 0; i < n_; ++i) {
        for (int l = 0; l < n_; ++l) coupling_[i][l] = i == l ? 1.0 : 0.5 * a.config.cartan.a[i][l];
        Eigen::VectorXd cyl = Eigen::VectorXd::Zero(ns);
        for (const auto& c : a.source[i]) cyl += c;
        density_.push_back(w.cwiseProduct(cyl));
        weight_.push_back((cyl.array() * inv).matrix());
    }
    const auto& modes = grid_->angular().modes();
    for (int l : modes) {
        std::vector<Eigen::Triplet<double>> trip;
        for (int i = 0; i < n_; ++i) {
            for (int c = 0; c < stiffness_.outerSize(); ++c)
                for (Sparse::InnerIterator it(stiffness_, c); it; ++it)
                    trip.emplace_back(i * ns + it.row(), i * ns + it.col(), it.value());
            for (int k = 0; k < ns; ++k) {
                if (l != 0) trip.emplace_back(i * ns + k, i * ns + k, double(l) * l * w[k]);
                for (int j = 0; j < n_; ++j)
                    if (coupling_[i][j] != 0) trip.emplace_back(i * ns + k, j * ns + k, -coupling_[i][j] * density_[j][k]);
            }
        }
        int size = n_ * ns;
        if (l == 0) {
            const Eigen::VectorXd& mu = grid_->measure();
            for (int i = 0; i < n_; ++i)
                for (int k = 0; k < ns; ++k) {
                    trip.emplace_back(i * ns + k, n_ * ns + i, mu[k]);
                    trip.emplace_back(n_ * ns + i, i * ns + k, mu[k]);
                }
            size += n_;
        }
        Sparse A(size, size);
        A.setFromTriplets(trip.begin(), trip.end());
        auto lu = std::make_unique<LU>();
        lu->compute(A);
        if (lu->info() != Eigen::Success)
            throw std::runtime_error("LinearizedSystem: singular factorisation for mode " + std::to_string(l));
        lu_.push_back(std::move(lu));
    }
}

Eigen::VectorXd LinearizedSystem::energy_apply(int mode, const Eigen::VectorXd& x) const {
    const int ns = grid_->ns();
    const Eigen::VectorXd& w = grid_->line().weights();
    Eigen::VectorXd y(n_ * ns);
    for (int i = 0; i < n_; ++i) {
        y.segment(i * ns, ns) = stiffness_ * x.segment(i * ns, ns);
        if (mode != 0) y.segment(i * ns, ns) += double(mode) * mode * w.cwiseProduct(x.segment(i * ns, ns));
    }
    return y;
}

Eigen::VectorXd LinearizedSystem::apply_mode(int mode, const Eigen::VectorXd& x) const {
    const int ns = grid_->ns();
    Eigen::VectorXd y = energy_apply(mode, x);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            if (coupling_[i][j] != 0)
                y.segment(i * ns, ns) -= coupling_[i][j] * density_[j].cwiseProduct(x.segment(j * ns, ns));
    return y;
}

Eigen::VectorXd LinearizedSystem::solve_mode(int q, const Eigen::VectorXd& rhs, bool transpose) const {
    const int ns = grid_->ns();
    const bool aug = grid_->angular().modes()[q] == 0;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n_ * ns + (aug ? n_ : 0));
    b.head(n_ * ns) = rhs;
    Eigen::VectorXd x = transpose ? Eigen::VectorXd(lu_[q]->transpose().solve(b)) : Eigen::VectorXd(lu_[q]->solve(b));
    return x.head(n_ * ns);
}

std::vector<Eigen::MatrixXd> LinearizedSystem::coefficients(const std::vector<Field>& f) const {
    if (static_cast<int>(f.size()) != n_) throw std::invalid_argument("LinearizedSystem: wrong component count");
    std::vector<Eigen::MatrixXd> c;
    for (const auto& x : f) {
        if (x.rows() != grid_->ns()) throw std::invalid_argument("LinearizedSystem: field size mismatch");
        if (x.cols() == 1 || grid_->nt() == 1) {
            Eigen::MatrixXd m = Eigen::MatrixXd::Zero(grid_->ns(), 2 * grid_->angular().modes().size());
            m.col(0) = x.rowwise().mean();
            c.push_back(m);
        } else {
            c.push_back(grid_->angular().analyse(x));
        }
    }
    return c;
}

std::vector<Field> LinearizedSystem::synthesise(const std::vector<Eigen::MatrixXd>& c) const {
    std::vector<Field> out;
    for (const auto& m : c)
        out.push_back(grid_->nt() == 1 ? Field(m.col(0)) : grid_->angular().synthesise(m, grid_->ns()));
    return out;
}

std::vector<Field> LinearizedSystem::apply(const std::vector<Field>& phi) const {
    const int ns = grid_->ns();
    const auto& modes = grid_->angular().modes();
    const Eigen::ArrayXd mu = grid_->measure().array();
    auto c = coefficients(phi);
    std::vector<Eigen::MatrixXd> out(n_, Eigen::MatrixXd::Zero(ns, c[0].cols()));
    for (std::size_t q = 0; q < modes.size(); ++q)
        for (int part = 0; part < (modes[q] == 0 ? 1 : 2); ++part) {
            const int col = 2 * static_cast<int>(q) + part;
            Eigen::VectorXd x(n_ * ns);
            for (int i = 0; i < n_; ++i) {
                x.segment(i * ns, ns) = c[i].col(col);
                if (modes[q] == 0) x.segment(i * ns, ns).array() -= mu.matrix().dot(c[i].col(col)) / mu.sum();
            }
            const Eigen::VectorXd y = apply_mode(modes[q], x);
            for (int i = 0; i < n_; ++i) {
                Eigen::ArrayXd v = y.segment(i * ns, ns).array();
                if (modes[q] == 0) v -= (v.sum() / mu.sum()) * mu;
                out[i].col(col) = (v / mu).matrix();
            }
        }
    return synthesise(out);
}

std::vector<Field> LinearizedSystem::solve(const std::vector<Field>& h) const {
    const int ns = grid_->ns();
    const auto& modes = grid_->angular().modes();
    const Eigen::VectorXd& mu = grid_->measure();
    auto c = coefficients(h);
    std::vector<Eigen::MatrixXd> out(n_, Eigen::MatrixXd::Zero(ns, c[0].cols()));
    for (std::size_t q = 0; q < modes.size(); ++q)
        for (int part = 0; part < (modes[q] == 0 ? 1 : 2); ++part) {
            const int col = 2 * static_cast<int>(q) + part;
            Eigen::VectorXd b(n_ * ns);
            for (int i = 0; i < n_; ++i) {
                Eigen::VectorXd v = mu.cwiseProduct(c[i].col(col));
                if (modes[q] == 0) v -= (v.sum() / mu.sum()) * mu;
                b.segment(i * ns, ns) = v;
            }
            const Eigen::VectorXd x = solve_mode(static_cast<int>(q), b, false);
            for (int i = 0; i < n_; ++i) out[i].col(col) = x.segment(i * ns, ns);
        }
    return synthesise(out);
}

double LinearizedSystem::energy_norm(const std::vector<Field>& phi) const {
    const int ns = grid_->ns();
    const auto& modes = grid_->angular().modes();
    auto c = coefficients(phi);
    double e = 0;
    for (std::size_t q = 0; q < modes.size(); ++q)
        for (int part = 0; part < (modes[q] == 0 ? 1 : 2); ++part) {
            const int col = 2 * static_cast<int>(q) + part;
            Eigen::VectorXd x(n_ * ns);
            for (int i = 0; i < n_; ++i) x.segment(i * ns, ns) = c[i].col(col);
            e += (modes[q] == 0 ? 2 * kPi : kPi) * x.dot(energy_apply(modes[q], x));
        }
    return std::sqrt(std::max(0.0, e));
}

double LinearizedSystem::mode_inverse_norm(int q, int max_iter, double tol, unsigned seed, int& iterations,
                                           bool& converged) const {
    const int ns = grid_->ns();
    const int mode = grid_->angular().modes()[q];
    const Eigen::VectorXd& mu = grid_->measure();
    std::mt19937_64 rng(seed + 7919u * static_cast<unsigned>(q));
    std::normal_distribution<double> g;
    Eigen::VectorXd x(n_ * ns);
    for (int k = 0; k < x.size(); ++k) x[k] = g(rng);
    auto project = [&](Eigen::VectorXd& v) {
        if (mode != 0) return;
        for (int i = 0; i < n_; ++i) {
            auto seg = v.segment(i * ns, ns);
            seg.array() -= mu.dot(seg) / mu.sum();
        }
    };
    auto knorm = [&](const Eigen::VectorXd& v) { return std::sqrt(std::max(0.0, v.dot(energy_apply(mode, v)))); };
    project(x);
    x /= knorm(x);
    double est = 0;
    converged = false;
    for (iterations = 1; iterations <= max_iter; ++iterations) {
        const Eigen::VectorXd tx = solve_mode(q, energy_apply(mode, x), false);
        const double next = knorm(tx);
        Eigen::VectorXd y = solve_mode(q, energy_apply(mode, tx), true);
        project(y);
        x = y / knorm(y);
        if (std::abs(next - est) <= tol * next) {
            est = next;
            converged = true;
            break;
        }
        est = next;
    }
    return est;
}

InverseNormEstimate LinearizedSystem::inverse_norm(int max_iter, double tol, unsigned seed) const {
    InverseNormEstimate r;
    const auto& modes = grid_->angular().modes();
    for (std::size_t q = 0; q < modes.size(); ++q) {
        int it = 0;
        bool ok = false;
        const double v = mode_inverse_norm(static_cast<int>(q), max_iter, tol, seed, it, ok);
        r.modes.push_back(modes[q]);
        r.per_mode.push_back(v);
        r.iterations.push_back(it);
        r.converged = r.converged && ok;
        r.value = std::max(r.value, v);
    }
    return r;
}

}  // namespace toda
