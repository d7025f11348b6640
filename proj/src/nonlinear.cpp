#include "toda/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace toda {

namespace {
constexpr double kPi = std::numbers::pi;

Fields couple(const Ansatz& a, const Fields& parts) {
    const int n = a.N();
    Fields out;
    for (int i = 0; i < n; ++i) {
        Field acc = Field::Zero(parts[0].rows(), parts[0].cols());
        for (int l = 0; l < n; ++l) {
            const double c = 0.5 * a.config.cartan.a[i][l];
            if (c != 0) acc += c * parts[l];
        }
        out.push_back(a.grid->subtract_mean(acc));
    }
    return out;
}

Field widen(const Field& f, int cols) {
    if (f.cols() == cols) return f;
    return f.col(0).replicate(1, cols);
}

double norm_sum(const SurfaceGrid& g, const Fields& f, double p) {
    double s = 0;
    for (const auto& x : f) s += g.lp_norm(x, p);
    return s;
}
}  // namespace

std::string status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::MaxIterations: return "max-iterations";
        case SolveStatus::Diverged: return "diverged";
        case SolveStatus::BallViolation: return "ball-violation";
        case SolveStatus::Overflow: return "overflow";
    }
    return "unknown";
}

Fields op_S(const Ansatz& a, const Fields& phi) {
    const int nt = a.grid->nt();
    Fields parts;
    for (int l = 0; l < a.N(); ++l) {
        const Field d = a.exp_pointwise(l) - a.bubble_pointwise(l);
        parts.push_back(d.cwiseProduct(widen(phi[l], nt)));
    }
    return couple(a, parts);
}

Fields op_N(const Ansatz& a, const Fields& phi, double cap) {
    const int nt = a.grid->nt();
    Fields parts;
    for (int l = 0; l < a.N(); ++l) {
        const Field p = widen(phi[l], nt);
        if (p.cwiseAbs().maxCoeff() > cap) throw std::overflow_error("op_N: correction exceeds the overflow cap");
        const Field q = p.unaryExpr([](double x) { return std::expm1(x) - x; });
        parts.push_back(a.exp_pointwise(l).cwiseProduct(q));
    }
    return couple(a, parts);
}

Fields toda_rhs(const Ansatz& a, const Fields& u) {
    Fields parts;
    for (int l = 0; l < a.N(); ++l) {
        const Field e = (u[l] + a.log_potential[l]).array().exp().matrix();
        parts.push_back(2.0 * a.config.eps * e);
    }
    return couple(a, parts);
}

Fields mean_field_rhs(const Ansatz& a, const Fields& u) {
    const int n = a.N();
    const SurfaceGrid& g = *a.grid;
    const auto rho = mass_rho(a, u);
    Fields out;
    std::vector<Field> ve;
    std::vector<double> tot;
    for (int l = 0; l < n; ++l) {
        ve.push_back((u[l] + a.log_potential[l]).array().exp().matrix());
        tot.push_back(g.integrate(ve.back()));
    }
    for (int i = 0; i < n; ++i) {
        Field acc = Field::Zero(g.ns(), g.nt());
        for (int l = 0; l < n; ++l) {
            const int c = a.config.cartan.a[i][l];
            if (c == 0) continue;
            acc += c * rho[l] * (ve[l] / tot[l] - Field::Constant(g.ns(), g.nt(), 1.0 / g.area()));
        }
        out.push_back(acc);
    }
    return out;
}

TodaResidual toda_residual(const Ansatz& a, const Fields& u) {
    const SurfaceGrid& g = *a.grid;
    const Fields f = toda_rhs(a, u);
    TodaResidual r;
    // Zero-coupling operator: the Neumann Laplacian in the same discretisation.
    for (int i = 0; i < a.N(); ++i) {
        const Field v = a.solver->solve(f[i]);
        const Field d = g.subtract_mean(widen(u[i], g.nt())) - widen(v, g.nt());
        r.l2 += g.lp_norm(d, 2.0);
    }
    // Weak form: stiffness applied to u minus the lumped mass times F.
    const auto& line = g.line();
    const Eigen::SparseMatrix<double> K = line.stiffness();
    const auto& ang = g.angular();
    const auto& modes = ang.modes();
    for (int i = 0; i < a.N(); ++i) {
        const Field ui = widen(u[i], g.nt());
        const Eigen::MatrixXd cu = g.nt() == 1 ? Eigen::MatrixXd(ui) : ang.analyse(ui);
        const Eigen::MatrixXd cf = g.nt() == 1 ? Eigen::MatrixXd(f[i]) : ang.analyse(f[i]);
        for (std::size_t q = 0; q < modes.size(); ++q)
            for (int part = 0; part < (modes[q] == 0 ? 1 : 2); ++part) {
                const int col = 2 * static_cast<int>(q) + part;
                Eigen::VectorXd w = K * cu.col(col) - g.measure().cwiseProduct(cf.col(col));
                if (modes[q] != 0) w += double(modes[q]) * modes[q] * line.weights().cwiseProduct(cu.col(col));
                r.weak += (modes[q] == 0 ? 2 * kPi : kPi) * w.cwiseAbs().sum();
            }
    }
    return r;
}

std::vector<double> mass_rho(const Ansatz& a, const Fields& u) {
    std::vector<double> rho;
    for (int l = 0; l < a.N(); ++l)
        rho.push_back(a.config.eps * a.grid->integrate((u[l] + a.log_potential[l]).array().exp().matrix()));
    return rho;
}

std::vector<double> weak_star_test(const Ansatz& a, const Fields& u,
                                   const std::function<double(const Eigen::Vector3d&)>& test) {
    const Field t = a.grid->sample(test);
    std::vector<double> out;
    for (int l = 0; l < a.N(); ++l) {
        const Field e = (widen(u[l], a.grid->nt()) + a.log_potential[l]).array().exp().matrix();
        out.push_back(a.config.eps * a.grid->integrate(e.cwiseProduct(t)));
    }
    return out;
}

std::vector<double> weak_star_limit(const Ansatz& a, const std::function<double(const Eigen::Vector3d&)>& test) {
    std::vector<double> out;
    for (int l = 0; l < a.N(); ++l) {
        double s = 0;
        for (const auto& x : a.config.points) s += 2 * kPi * a.config.cartan.alpha[l] * test(x);
        out.push_back(s);
    }
    return out;
}

std::vector<double> local_mass(const Ansatz& a, const Fields& u, const Eigen::Vector3d& xi, double r) {
    const Surface& s = a.config.surface;
    return weak_star_test(a, u, [&](const Eigen::Vector3d& x) { return s.geodesic_distance(x, xi) < r ? 1.0 : 0.0; });
}

FixedPointResult fixed_point_solve(const Ansatz& a, const LinearizedSystem& L, const SolverOptions& opt) {
    const SurfaceGrid& g = *a.grid;
    const int n = a.N();
    const double eps = a.config.eps;
    const double p = a.config.p;
    FixedPointResult res;
    CorrectionState& st = res.state;
    st.ball_bound = opt.ball_radius * std::pow(eps, (2 - p) / (4.0 * n * p)) * std::abs(std::log(eps));
    const Fields R = residual(a, p).R;
    Fields phi(n, Field::Zero(g.ns(), g.nt()));
    st.norms.push_back(0.0);
    int growth = 0;
    st.status = SolveStatus::MaxIterations;
    for (st.iterations = 1; st.iterations <= opt.max_iter; ++st.iterations) {
        Fields rhs;
        try {
            const Fields s = op_S(a, phi), q = op_N(a, phi, opt.cap);
            for (int i = 0; i < n; ++i) rhs.push_back(s[i] + q[i] + R[i]);
        } catch (const std::overflow_error& e) {
            st.status = SolveStatus::Overflow;
            st.message = e.what();
            break;
        }
        Fields next = L.solve(rhs);
        Fields step;
        for (int i = 0; i < n; ++i) {
            step.push_back(opt.damping * (next[i] - phi[i]));
            next[i] = phi[i] + step[i];
        }
        const double sn = L.energy_norm(step);
        phi = std::move(next);
        st.norms.push_back(L.energy_norm(phi));
        if (!st.steps.empty()) st.ratios.push_back(sn / st.steps.back());
        st.steps.push_back(sn);
        if (opt.check_ball && st.norms.back() > st.ball_bound) {
            st.status = SolveStatus::BallViolation;
            std::ostringstream os;
            os << "correction norm " << st.norms.back() << " left the ball of radius " << st.ball_bound;
            st.message = os.str();
            break;
        }
        if (!st.ratios.empty() && st.ratios.back() >= 1.0) {
            if (++growth >= 3) {
                st.status = SolveStatus::Diverged;
                st.message = "step ratio >= 1 for three consecutive iterations";
                break;
            }
        } else {
            growth = 0;
        }
        if (sn < opt.tol) {
            st.status = SolveStatus::Converged;
            break;
        }
    }
    st.iterations = std::min(st.iterations, opt.max_iter);
    st.phi = phi;

    SolutionReport& rep = res.report;
    for (int i = 0; i < n; ++i) rep.u.push_back(widen(a.W[i], g.nt()) + phi[i]);
    rep.rho = mass_rho(a, rep.u);
    rep.rho_deviation = 0;
    for (int i = 0; i < n; ++i) {
        rep.rho_limit.push_back(2 * kPi * a.config.cartan.alpha[i] * a.m());
        rep.rho_deviation = std::max(rep.rho_deviation, std::abs(rep.rho[i] - rep.rho_limit[i]) / rep.rho_limit[i]);
    }
    rep.toda = toda_residual(a, rep.u);
    const Fields f1 = toda_rhs(a, rep.u), f2 = mean_field_rhs(a, rep.u);
    double diff = 0, scale = 0;
    for (int i = 0; i < n; ++i) {
        diff += g.lp_norm(f1[i] - f2[i], 1.0);
        scale += g.lp_norm(f1[i], 1.0);
    }
    rep.mean_field_gap = diff / scale;
    rep.phi_norm = st.norms.back();
    for (std::size_t k = 1; k < st.ratios.size(); ++k) rep.max_ratio_after_first = std::max(rep.max_ratio_after_first, st.ratios[k]);
    (void)norm_sum;
    return res;
}

}  // namespace toda
