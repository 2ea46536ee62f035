#include "liquidstar/mode_energy.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "liquidstar/errors.hpp"
#include "liquidstar/quadrature.hpp"

namespace liquidstar {

namespace {

constexpr double kPi = std::numbers::pi;

void require_same_grid(const Eigen::VectorXd& a, const StarProfile& p) {
    if (a.size() != p.r.size() || std::abs(a(a.size() - 1) - p.R) > 1e-12 * p.R)
        throw GridMismatch("field grid does not match the profile grid");
}

// r^k with 0^0 = 1.
double rpow(double r, int k) { return k == 0 ? 1.0 : std::pow(r, k); }

}  // namespace

ChiField chi_from_samples(int l, const Eigen::VectorXd& r, const Eigen::VectorXd& values,
                          BoundaryCondition bc) {
    check_uniform_grid(r, r(r.size() - 1));
    return {l, r, values, derivative_uniform(values, r(1)), bc};
}

ChiField chi_from_polynomial(int l, const StarProfile& p, const Eigen::VectorXd& c,
                             BoundaryCondition bc) {
    ChiField chi{l, p.r, Eigen::VectorXd::Zero(p.r.size()), Eigen::VectorXd::Zero(p.r.size()), bc};
    for (Eigen::Index i = 0; i < p.r.size(); ++i) {
        const double t = p.r(i) / p.R;
        double v = 0, d = 0;
        for (Eigen::Index k = c.size() - 1; k >= 0; --k) {
            d = d * t + v;
            v = v * t + c(k);
        }
        chi.values(i) = v;
        chi.derivs(i) = d / p.R;
    }
    return chi;
}

double bc_residual(const ChiField& chi) {
    const Eigen::Index n = chi.r.size() - 1;
    const double R = chi.r(n);
    const double scale = chi.values.cwiseAbs().maxCoeff() + R * chi.derivs.cwiseAbs().maxCoeff();
    if (scale == 0) return 0;
    switch (chi.bc) {
        case BoundaryCondition::NeumannAtR:
            return std::abs(R * chi.derivs(n)) / scale;
        case BoundaryCondition::RadialRobin:
            return std::abs(3 * chi.values(n) + R * chi.derivs(n)) / scale;
        default:
            return 0;
    }
}

void require_bc(const ChiField& chi, BoundaryCondition bc, double tol) {
    if (chi.bc != bc) throw BcMismatch("field does not claim the required boundary condition");
    const double res = bc_residual(chi);
    if (!(res <= tol)) throw BcMismatch("boundary condition residual " + std::to_string(res));
}

ChiField random_neumann_chi(int l, const StarProfile& p, std::uint64_t seed, int degree) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(degree + 1);
    double s = 0;
    for (int k = 0; k <= degree; ++k) {
        if (k == 1) continue;
        c(k) = u(rng);
        s += k * c(k);
    }
    c(1) = -s;
    return chi_from_polynomial(l, p, c, BoundaryCondition::NeumannAtR);
}

ChiField random_robin_chi(const StarProfile& p, std::uint64_t seed, int degree) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(degree + 1);
    double s = 0;
    for (int k = 1; k <= degree; ++k) {
        c(k) = u(rng);
        s += (3 + k) * c(k);
    }
    c(0) = -s / 3;
    return chi_from_polynomial(0, p, c, BoundaryCondition::RadialRobin);
}

RadialModeFunction g_from_chi(const ChiField& chi, const StarProfile& p) {
    require_same_grid(chi.r, p);
    const int l = chi.l;
    const Eigen::Index n = p.r.size() - 1;
    RadialModeFunction g{l, p.r, Eigen::VectorXd(n + 1)};
    // A field without a claimed condition gets the general formula at every node; a
    // claimed condition must hold and buys the analytic boundary value.
    const bool reduce = chi.bc != BoundaryCondition::None;
    if (l == 0) {
        if (reduce) require_bc(chi, BoundaryCondition::RadialRobin);
        for (Eigen::Index i = 0; i <= n; ++i) {
            const double r = p.r(i);
            g.values(i) = 3 * p.rho(i) * chi.values(i) +
                          r * (p.drho(i) * chi.values(i) + p.rho(i) * chi.derivs(i));
        }
        if (reduce) g.values(n) = p.R * p.drho(n) * chi.values(n);
        return g;
    }
    if (reduce) require_bc(chi, BoundaryCondition::NeumannAtR);
    for (Eigen::Index i = 0; i <= n; ++i) {
        const double r = p.r(i);
        if (i == 0 && l >= 2) {
            g.values(i) = 0;
            continue;
        }
        g.values(i) = (p.drho(i) * chi.values(i) + p.rho(i) * chi.derivs(i)) * rpow(r, l - 1);
    }
    if (reduce) g.values(n) = p.drho(n) * chi.values(n) * rpow(p.R, l - 1);
    return g;
}

ChiField chi_from_g(int l, const RadialModeFunction& g, const StarProfile& p) {
    require_same_grid(g.r, p);
    const int n = p.cells();
    const double h = p.h();
    ChiField chi{l, p.r, Eigen::VectorXd(n + 1), Eigen::VectorXd(n + 1), BoundaryCondition::None};
    if (l == 0) {
        const PotentialMode psi = psi_from_g(0, g, p.R);
        for (int i = 1; i <= n; ++i) {
            const double r = p.r(i), rho = p.rho(i), dp = psi.dpsi(i);
            chi.values(i) = dp / (r * rho);
            chi.derivs(i) = (g.values(i) - 3 * dp / r - dp * p.drho(i) / rho) / (r * rho);
        }
        for (Eigen::VectorXd* v : {&chi.values, &chi.derivs})
            (*v)(0) = 4 * (*v)(1) - 6 * (*v)(2) + 4 * (*v)(3) - (*v)(4);
        chi.bc = BoundaryCondition::RadialRobin;
        return chi;
    }
    // G = g r^(1-l) = (rho chi)'; integrate inward from rho chi(R) = chi(R).
    Eigen::VectorXd G(n + 1);
    for (int i = 1; i <= n; ++i) G(i) = g.values(i) * rpow(p.r(i), 1 - l);
    G(0) = 4 * G(1) - 6 * G(2) + 4 * G(3) - G(4);
    const double chiR = g.values(n) * rpow(p.R, 1 - l) / p.drho(n);
    const GaussRule q = gauss_legendre(3);
    Eigen::VectorXd rhochi(n + 1);
    rhochi(n) = p.rho(n) * chiR;
    for (int i = n - 1; i >= 0; --i) {
        const int f = cubic_stencil(i, n);
        double s = 0;
        for (int k = 0; k < 3; ++k)
            s += 0.5 * h * q.w(k) * lagrange4(i - f + 0.5 * (q.x(k) + 1)).dot(G.segment<4>(f));
        rhochi(i) = rhochi(i + 1) - s;
    }
    chi.values = rhochi.cwiseQuotient(p.rho);
    chi.derivs = (G - p.drho.cwiseProduct(chi.values)).cwiseQuotient(p.rho);
    chi.values(n) = chiR;
    chi.derivs(n) = 0;
    chi.bc = BoundaryCondition::NeumannAtR;
    return chi;
}

std::string route_name(Route r) {
    switch (r) {
        case Route::Direct: return "direct";
        case Route::ChiOne: return "chi1";
        case Route::ChiTwo: return "chi2";
        case Route::Radial: return "radial";
    }
    return "?";
}

namespace {

void fill_g_diagnostics(ModeEnergy& e, const RadialModeFunction& g, const StarProfile& p) {
    const Eigen::VectorXd w = g.values.cwiseProduct(p.r);
    e.g_l2 = simpson(w.cwiseProduct(w), p.h());
    const double gb = g.values(g.values.size() - 1);
    e.g_boundary_sq = gb * gb;
}

}  // namespace

ModeEnergy energy_direct(int l, int m, const RadialModeFunction& g, const StarProfile& p) {
    require_same_grid(g.r, p);
    const int n = p.cells();
    const double gamma = p.params.gamma, R = p.R;
    const PotentialMode psi = psi_from_g(l, g, R);
    Eigen::VectorXd f(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double r2 = p.r(i) * p.r(i), gi = g.values(i);
        f(i) = (gamma * std::pow(p.rho(i), gamma - 2) * gi * gi + 4 * kPi * gi * psi.psi(i)) * r2;
    }
    ModeEnergy e;
    e.l = l;
    e.m = m;
    e.route = Route::Direct;
    e.lambda = simpson(f, p.h());
    const double dR = p.drho(n), gR = g.values(n), psiR = psi.psi(n);
    e.gamma_term = -(R * R / dR) *
                   ((gamma + 4 * kPi * R / (dR * (2 * l + 1))) * gR * gR + 8 * kPi * gR * psiR);
    e.total = e.lambda + e.gamma_term;
    fill_g_diagnostics(e, g, p);
    return e;
}

ModeEnergy energy_chi_one(const ChiField& chi, const StarProfile& p, int m) {
    require_same_grid(chi.r, p);
    require_bc(chi, BoundaryCondition::NeumannAtR);
    const int n = p.cells(), l = chi.l;
    const double gamma = p.params.gamma;
    Eigen::VectorXd f(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double w = rpow(p.r(i), 2 * l);
        if (w == 0) {
            f(i) = 0;
            continue;
        }
        const double rc = p.rho(i) * chi.values(i);
        const double drc = p.drho(i) * chi.values(i) + p.rho(i) * chi.derivs(i);
        f(i) = (gamma * std::pow(p.rho(i), gamma - 2) * drc * drc - 4 * kPi * rc * rc) * w;
    }
    ModeEnergy e;
    e.l = l;
    e.m = m;
    e.route = Route::ChiOne;
    e.lambda = simpson(f, p.h());
    e.gamma_term = -gamma * p.drho(n) * chi.values(n) * chi.values(n) * rpow(p.R, 2 * l);
    e.total = e.lambda + e.gamma_term;
    fill_g_diagnostics(e, g_from_chi(chi, p), p);
    return e;
}

ModeEnergy energy_chi_two(const ChiField& chi, const StarProfile& p, int m) {
    require_same_grid(chi.r, p);
    require_bc(chi, BoundaryCondition::NeumannAtR);
    const int n = p.cells(), l = chi.l;
    const double gamma = p.params.gamma;
    Eigen::VectorXd f(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double r = p.r(i);
        if (r == 0) {
            f(i) = 0;
            continue;
        }
        const double c = chi.values(i), d = chi.derivs(i);
        f(i) = gamma * std::pow(p.rho(i), gamma) * d * d * rpow(r, 2 * l) -
               2.0 * (l - 1) * p.dpgamma(i) * c * c * rpow(r, 2 * l - 1);
    }
    ModeEnergy e;
    e.l = l;
    e.m = m;
    e.route = Route::ChiTwo;
    e.lambda = e.total = simpson(f, p.h());
    fill_g_diagnostics(e, g_from_chi(chi, p), p);
    return e;
}

double radial_energy(const ChiField& chi, const StarProfile& p) {
    require_same_grid(chi.r, p);
    require_bc(chi, BoundaryCondition::RadialRobin);
    const int n = p.cells();
    const double gamma = p.params.gamma, R = p.R;
    Eigen::VectorXd f(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double r = p.r(i), r3 = r * r * r;
        const double c = chi.values(i), d = chi.derivs(i);
        f(i) = gamma * r3 * r * std::pow(p.rho(i), gamma) * d * d +
               (4 - 3 * gamma) * r3 * p.dpgamma(i) * c * c;
    }
    return simpson(f, p.h()) + 3 * gamma * R * R * R * chi.values(n) * chi.values(n);
}

double energy_norm_E(const ChiField& chi, double R) {
    const Eigen::Index n = chi.r.size() - 1;
    const Eigen::VectorXd r2 = chi.r.cwiseProduct(chi.r);
    const Eigen::VectorXd a = r2.cwiseProduct(chi.derivs), b = r2.cwiseProduct(chi.values);
    const double h = chi.r(n) / n;
    const double cR = chi.values(n);
    return simpson(a.cwiseProduct(a), h) + simpson(b.cwiseProduct(b), h) +
           (R * R * R + R * R * R * R) * cR * cR;
}

EnergyTable total_energy(const std::vector<ModeInput>& fields, const StarProfile& p) {
    EnergyTable t;
    for (const ModeInput& in : fields) {
        ModeEnergy e;
        double delta = 0;
        if (const ChiField* chi = std::get_if<ChiField>(&in.field)) {
            const ModeEnergy d = energy_direct(in.l, in.m, g_from_chi(*chi, p), p);
            if (in.l == 0) {
                e = d;
                e.route = Route::Radial;
                e.lambda = e.total = radial_energy(*chi, p);
                e.gamma_term = 0;
            } else {
                e = energy_chi_two(*chi, p, in.m);
            }
            const double scale = std::max({std::abs(e.total), std::abs(d.total), 1e-300});
            delta = std::abs(e.total - d.total) / scale;
        } else {
            e = energy_direct(in.l, in.m, std::get<RadialModeFunction>(in.field), p);
        }
        t.total += e.total;
        t.modes.push_back(e);
        t.route_delta.push_back(delta);
    }
    return t;
}

BoundRatios bound_ratios(const ModeEnergy& e, const StarProfile& p) {
    const double dR = p.drho(p.cells()), R = p.R;
    BoundRatios b;
    b.upper_norm = e.g_l2 - (R * R / dR) * e.g_boundary_sq;
    b.lower_norm = e.g_l2 + (R * R / (dR * dR)) * e.g_boundary_sq;
    b.upper_ratio = e.total / b.upper_norm;
    b.lower_ratio = e.total / b.lower_norm;
    return b;
}

Obstruction constant_chi_obstruction(const StarProfile& p) {
    return {simpson(p.r.cwiseProduct(p.drho), p.h()) - p.R, simpson(p.rho, p.h())};
}

}  // namespace liquidstar
