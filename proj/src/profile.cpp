#include "liquidstar/profile.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "liquidstar/errors.hpp"
#include "liquidstar/quadrature.hpp"

namespace liquidstar {

namespace {

constexpr double kPi = std::numbers::pi;

using State = std::array<double, 2>;  // (rho or ln rho, enclosed mass)

struct System {
    double gamma;
    bool log_form;  // gamma == 1: first component is ln rho

    double density(const State& y) const { return log_form ? std::exp(y[0]) : y[0]; }

    State rhs(double r, const State& y) const {
        const double rho = std::max(density(y), 0.0);
        const double m = y[1];
        if (log_form) return {-4 * kPi * m / (r * r), r * r * rho};
        return {-4 * kPi * m * std::pow(rho, 2 - gamma) / (gamma * r * r), r * r * rho};
    }

    // Dormand-Prince 5(4) step; returns the 5th-order solution and the error estimate.
    State step(double r, const State& y, double h, State& err) const {
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                                a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                                a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                                b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695,
                                e4 = b4 - 393.0 / 640, e5 = b5 + 92097.0 / 339200,
                                e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;
        State k1 = rhs(r, y), k2, k3, k4, k5, k6, k7, t, out;
        auto comb = [&](auto... terms) {
            State s = y;
            for (int i = 0; i < 2; ++i) {
                double acc = 0;
                ((acc += terms.first * (*terms.second)[i]), ...);
                s[i] += h * acc;
            }
            return s;
        };
        using P = std::pair<double, const State*>;
        t = comb(P{a21, &k1});
        k2 = rhs(r + h / 5, t);
        t = comb(P{a31, &k1}, P{a32, &k2});
        k3 = rhs(r + 3 * h / 10, t);
        t = comb(P{a41, &k1}, P{a42, &k2}, P{a43, &k3});
        k4 = rhs(r + 4 * h / 5, t);
        t = comb(P{a51, &k1}, P{a52, &k2}, P{a53, &k3}, P{a54, &k4});
        k5 = rhs(r + 8 * h / 9, t);
        t = comb(P{a61, &k1}, P{a62, &k2}, P{a63, &k3}, P{a64, &k4}, P{a65, &k5});
        k6 = rhs(r + h, t);
        out = comb(P{b1, &k1}, P{b3, &k3}, P{b4, &k4}, P{b5, &k5}, P{b6, &k6});
        k7 = rhs(r + h, out);
        for (int i = 0; i < 2; ++i)
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                          e7 * k7[i]);
        return out;
    }
};

struct Integrator {
    const System& sys;
    const SolverOptions& opts;
    double h;      // current step proposal
    int steps = 0;

    double error_norm(const State& y0, const State& y1, const State& err) const {
        double e = 0;
        for (int i = 0; i < 2; ++i) {
            const double sc = opts.tol * (1e-3 + std::max(std::abs(y0[i]), std::abs(y1[i])));
            e = std::max(e, std::abs(err[i]) / sc);
        }
        return e;
    }

    // One accepted step of size at most hmax. Returns the step taken.
    double advance(double r, State& y, double hmax) {
        if (opts.fixed_step > 0) {
            const double hs = std::min(hmax, opts.fixed_step);
            State err;
            y = sys.step(r, y, hs, err);
            ++steps;
            return hs;
        }
        for (;;) {
            if (++steps > opts.max_steps) throw StepFailure("step budget exhausted at r=" + std::to_string(r));
            const double hs = std::min(h, hmax);
            if (!(hs > 1e-15 * std::max(r, 1e-300)))
                throw StepFailure("step size underflow at r=" + std::to_string(r));
            State err;
            State yn = sys.step(r, y, hs, err);
            const double e = error_norm(y, yn, err);
            if (std::isfinite(e) && e <= 1) {
                const double fac = e == 0 ? 5 : std::clamp(0.9 * std::pow(e, -0.2), 0.2, 5.0);
                if (hs == h) h = hs * fac;
                else h = std::max(h, hs * std::min(fac, 1.0));
                y = yn;
                return hs;
            }
            h = hs * (std::isfinite(e) ? std::clamp(0.9 * std::pow(e, -0.2), 0.1, 0.9) : 0.1);
        }
    }

    void integrate_to(double& r, State& y, double r_end) {
        while (r < r_end) {
            const double left = r_end - r;
            const double hs = advance(r, y, left);
            r = (hs == left) ? r_end : r + hs;
        }
    }
};

}  // namespace

double central_length(const PolytropeParams& p) {
    return std::sqrt(3 * p.gamma / (2 * kPi * std::pow(p.rho_c, 2 - p.gamma)));
}

StarProfile solve_profile(const PolytropeParams& params, const SolverOptions& opts) {
    if (!(params.rho_c > 1)) throw DegenerateStar("rho_c must exceed 1 (got " + std::to_string(params.rho_c) + ")");
    if (!(params.gamma >= 1 && params.gamma <= 2))
        throw std::invalid_argument("gamma must lie in [1, 2]");
    if (opts.grid_n < 4) throw std::invalid_argument("grid_n must be at least 4");

    const double gamma = params.gamma, rc = params.rho_c;
    const System sys{gamma, gamma == 1};
    const double L = central_length(params);
    const double rmax = opts.max_radius > 0 ? opts.max_radius : 1000 * L;

    // Two-term Taylor start.
    const double eps = 1e-6 * L;
    const double a = -(2 * kPi / (3 * gamma)) * std::pow(rc, 3 - gamma);
    auto taylor = [&](double r) {
        const double rho = rc + a * r * r;
        const double m = rc * r * r * r / 3 + a * std::pow(r, 5) / 5;
        return State{sys.log_form ? std::log(rho) : rho, m};
    };
    auto above = [&](const State& y) { return sys.log_form ? y[0] > 0 : y[0] > 1; };

    StarProfile p;
    p.params = params;
    p.tol = opts.tol;

    // Pass 1: locate the surface.
    Integrator it{sys, opts, 1e-3 * L};
    double r = eps;
    State y = taylor(eps);
    std::vector<double> sr{0, eps}, srho{rc, sys.density(y)};
    double R = -1;
    for (;;) {
        if (r >= rmax) throw NoSurfaceFound("density above 1 up to r=" + std::to_string(rmax));
        const State y0 = y;
        const double hs = it.advance(r, y, rmax - r);
        if (!above(y)) {
            double lo = 0, hi = hs;
            State err;
            while (hi - lo > opts.tol * (r + hi)) {
                const double mid = 0.5 * (lo + hi);
                if (above(sys.step(r, y0, mid, err))) lo = mid;
                else hi = mid;
            }
            R = r + 0.5 * (lo + hi);
            break;
        }
        r += hs;
        sr.push_back(r);
        srho.push_back(sys.density(y));
    }
    sr.push_back(R);
    srho.push_back(1);
    p.step_r = Eigen::Map<Eigen::VectorXd>(sr.data(), sr.size());
    p.step_rho = Eigen::Map<Eigen::VectorXd>(srho.data(), srho.size());
    p.R = R;

    // Pass 2: land on the uniform grid.
    const int n = opts.grid_n;
    p.r = Eigen::VectorXd::LinSpaced(n + 1, 0, R);
    p.r(n) = R;
    p.rho.resize(n + 1);
    p.drho.resize(n + 1);
    p.dpgamma.resize(n + 1);
    p.rho(0) = rc;
    p.drho(0) = 0;
    p.dpgamma(0) = 0;
    Integrator it2{sys, opts, 1e-3 * L};
    r = eps;
    y = taylor(eps);
    for (int i = 1; i <= n; ++i) {
        const double ri = p.r(i);
        State yi = ri <= eps ? taylor(ri) : y;
        if (ri > eps) {
            it2.integrate_to(r, y, ri);
            yi = y;
        }
        const double rho = sys.density(yi);
        const double m = yi[1];
        p.rho(i) = rho;
        p.dpgamma(i) = -4 * kPi * m * rho / (ri * ri);
        p.drho(i) = p.dpgamma(i) / (gamma * std::pow(rho, gamma - 1));
    }
    finish_profile(p);
    return p;
}

void finish_profile(StarProfile& p) {
    const Eigen::Index n = p.r.size();
    p.mass.resize(n);
    p.dpgamma_over_r.resize(n);
    p.mass(0) = 0;
    p.dpgamma_over_r(0) = 4 * kPi / 3 * p.rho(0) * p.rho(0);
    for (Eigen::Index i = 1; i < n; ++i) {
        p.mass(i) = -p.dpgamma(i) * p.r(i) * p.r(i) / (4 * kPi * p.rho(i));
        p.dpgamma_over_r(i) = -p.dpgamma(i) / p.r(i);
    }
}

namespace {

double pchip_node_slope(const Eigen::VectorXd& y, double h, Eigen::Index k) {
    const Eigen::Index n = y.size();
    auto del = [&](Eigen::Index j) { return (y(j + 1) - y(j)) / h; };
    if (k == 0 || k == n - 1) {
        const double d0 = k == 0 ? del(0) : del(n - 2);
        const double d1 = k == 0 ? del(1) : del(n - 3);
        double s = 0.5 * (3 * d0 - d1);
        if (s * d0 <= 0) return 0;
        if (d0 * d1 < 0 && std::abs(s) > 3 * std::abs(d0)) return 3 * d0;
        return s;
    }
    const double a = del(k - 1), b = del(k);
    return a * b > 0 ? 2 / (1 / a + 1 / b) : 0;
}

double interp(const StarProfile& p, const Eigen::VectorXd& y, Eigen::Index i, double t) {
    const double h = p.h();
    return hermite(y(i), y(i + 1), pchip_node_slope(y, h, i), pchip_node_slope(y, h, i + 1), h, t);
}

Eigen::Index locate(const StarProfile& p, double r, double& t) {
    if (!(r >= 0) || r > p.R * (1 + 1e-14))
        throw OutOfDomain("r=" + std::to_string(r) + " outside [0, " + std::to_string(p.R) + "]");
    const int n = p.cells();
    const double s = std::min(r, p.R) / p.h();
    Eigen::Index i = std::min<Eigen::Index>(static_cast<Eigen::Index>(s), n - 1);
    t = s - static_cast<double>(i);
    return i;
}

}  // namespace

ProfileSample eval_profile(const StarProfile& p, double r) {
    double t;
    const Eigen::Index i = locate(p, r, t);
    if (t == 0) return {p.rho(i), p.drho(i), p.dpgamma(i)};
    return {interp(p, p.rho, i, t), interp(p, p.drho, i, t), interp(p, p.dpgamma, i, t)};
}

double eval_dpgamma_over_r(const StarProfile& p, double r) {
    double t;
    const Eigen::Index i = locate(p, r, t);
    if (t == 0) return p.dpgamma_over_r(i);
    return interp(p, p.dpgamma_over_r, i, t);
}

BoundReport derivative_bound_report(const StarProfile& p) {
    const double lo = 4 * kPi / 3;
    const double hi = lo * p.params.rho_c * p.params.rho_c;
    BoundReport b;
    b.lower = p.dpgamma_over_r.array() - lo;
    b.upper = hi - p.dpgamma_over_r.array();
    const Eigen::Index n = p.r.size();
    b.lower_margin = b.lower.tail(n - 1).minCoeff();
    b.upper_margin = b.upper.tail(n - 1).minCoeff();
    return b;
}

}  // namespace liquidstar
