#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "liquidstar/errors.hpp"
#include "liquidstar/profile.hpp"
#include "liquidstar/quadrature.hpp"

using namespace liquidstar;

namespace {

constexpr double kPi = std::numbers::pi;
const double kWave = std::sqrt(2 * kPi);

double closed_form(double r) { return r == 0 ? 2.0 : 2 * std::sin(kWave * r) / (kWave * r); }

// Root of 2 sin(kR)/(kR) = 1 by bisection on [0.5, 1].
double closed_form_radius() {
    double a = 0.5, b = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (a + b);
        (closed_form(m) > 1 ? a : b) = m;
    }
    return 0.5 * (a + b);
}

// Classical RK4 on (rho, m) with a fixed step, Taylor start one step off the centre.
std::vector<double> rk4_density(double gamma, double rho_c, double dr, int steps) {
    auto f = [&](double r, const std::array<double, 2>& y) {
        return std::array<double, 2>{-4 * kPi * y[1] * std::pow(y[0], 2 - gamma) / (gamma * r * r), r * r * y[0]};
    };
    const double a = -(2 * kPi / (3 * gamma)) * std::pow(rho_c, 3 - gamma);
    std::array<double, 2> y{rho_c + a * dr * dr, rho_c * dr * dr * dr / 3 + a * std::pow(dr, 5) / 5};
    std::vector<double> out{rho_c, y[0]};
    for (int s = 1; s < steps; ++s) {
        const double r = s * dr;
        const auto k1 = f(r, y);
        const auto k2 = f(r + dr / 2, {y[0] + dr / 2 * k1[0], y[1] + dr / 2 * k1[1]});
        const auto k3 = f(r + dr / 2, {y[0] + dr / 2 * k2[0], y[1] + dr / 2 * k2[1]});
        const auto k4 = f(r + dr, {y[0] + dr * k3[0], y[1] + dr * k3[1]});
        for (int i = 0; i < 2; ++i) y[i] += dr / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        out.push_back(y[0]);
    }
    return out;
}

}  // namespace

TEST_CASE("gamma = 2 matches the closed form") {
    const double R_exact = closed_form_radius();
    CHECK(R_exact == doctest::Approx(0.75618).epsilon(1e-5));
    const StarProfile p = solve_profile({2, 2});
    CHECK(std::abs(p.R - R_exact) < 1e-8);
    CHECK(std::abs(p.R - R_exact) < 1e-11);  // measured 3.5e-13
    double err = 0;
    for (Eigen::Index i = 0; i < p.r.size(); ++i) err = std::max(err, std::abs(p.rho(i) - closed_form(p.r(i))));
    CHECK(err < 1e-6);
    CHECK(err < 1e-12);
    CHECK(p.cells() == 2048);
    CHECK(p.step_r.size() > 0);
}

TEST_CASE("solve_profile rejects degenerate and out-of-range inputs") {
    CHECK_THROWS_AS(solve_profile({1.5, 1.0}), DegenerateStar);
    CHECK_THROWS_AS(solve_profile({1.5, 0.5}), DegenerateStar);
    CHECK_THROWS_AS(solve_profile({2.5, 2}), std::invalid_argument);
    CHECK_THROWS_AS(solve_profile({0.9, 2}), std::invalid_argument);
}

TEST_CASE("gamma = 1.2, rho_c = 10 agrees with an independent RK4 integration") {
    const StarProfile p = solve_profile({1.2, 10});
    const int refine = 10;
    const double dr = p.R / (p.cells() * refine);
    const auto ref = rk4_density(1.2, 10, dr, p.cells() * refine);
    double err = 0;
    for (int i = 0; i <= p.cells(); ++i) err = std::max(err, std::abs(p.rho(i) - ref[i * refine]));
    CHECK(err < 1e-8);
    CHECK(std::abs(ref.back() - 1) < 1e-8);
    for (int i = 0; i < p.cells(); ++i) CHECK(p.rho(i + 1) < p.rho(i));
    CHECK(derivative_bound_report(p).holds());
}

TEST_CASE("returned grid satisfies the ODE and the integral identity") {
    for (double gamma : {1.0, 1.2, 4.0 / 3, 2.0}) {
        const StarProfile p = solve_profile({gamma, 5});
        const double h = p.h();
        // (rho^gamma)' against differences of rho^gamma.
        const Eigen::VectorXd pg = p.rho.array().pow(gamma).matrix();
        const Eigen::VectorXd d = derivative_uniform(pg, h);
        const double scale = p.dpgamma.cwiseAbs().maxCoeff();
        CHECK((d - p.dpgamma).cwiseAbs().maxCoeff() / scale < 1e-8);
        // drho = dpgamma / (gamma rho^(gamma-1)).
        for (Eigen::Index i = 0; i < p.r.size(); ++i)
            CHECK(std::abs(p.drho(i) * gamma * std::pow(p.rho(i), gamma - 1) - p.dpgamma(i)) <= 1e-12 * scale);
        // -(rho^gamma)'/r = 4 pi rho m / r^3 with m by cumulative quadrature.
        for (Eigen::Index i = 1; i < p.r.size(); ++i) {
            const double r = p.r(i);
            CHECK(std::abs(-p.dpgamma(i) / r - 4 * kPi * p.rho(i) * p.mass(i) / (r * r * r)) <
                  1e-9 * p.dpgamma_over_r(0));
        }
    }
}

TEST_CASE("fixed-step runs converge at high order on the closed form") {
    const double R_exact = closed_form_radius();
    std::vector<double> errs;
    for (double step : {0.02, 0.01, 0.005}) {
        SolverOptions o;
        o.fixed_step = step;
        errs.push_back(std::abs(solve_profile({2, 2}, o).R - R_exact));
    }
    const double order1 = std::log2(errs[0] / errs[1]), order2 = std::log2(errs[1] / errs[2]);
    CHECK(order1 >= 2);
    CHECK(order2 >= 2);
    CHECK(order1 > 3.5);  // Dormand-Prince fifth order, measured near 5
}

TEST_CASE("gamma -> 1+ approaches the logarithmic branch continuously") {
    const StarProfile p1 = solve_profile({1.0, 3});
    double prev = 1;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        const StarProfile q = solve_profile({1.0 + eps, 3});
        const double d = std::abs(q.R - p1.R);
        CHECK(d < prev);
        CHECK(d < 10 * eps * p1.R);
        prev = d;
    }
}

TEST_CASE("eval_profile at the centre, the surface and inside") {
    const StarProfile p = solve_profile({2, 2});
    const ProfileSample c = eval_profile(p, 0);
    CHECK(c.rho == 2);
    CHECK(c.drho == 0);
    CHECK(c.dpgamma == 0);
    const ProfileSample s = eval_profile(p, p.R);
    CHECK(std::abs(s.rho - 1) <= 1e-12);
    CHECK(s.drho < 0);
    CHECK(s.dpgamma < 0);
    CHECK(std::abs(eval_profile(p, p.R / 2).rho - closed_form(p.R / 2)) < 1e-6);
    CHECK(std::abs(eval_profile(p, 0.123).rho - closed_form(0.123)) < 1e-10);
    CHECK_THROWS_AS(eval_profile(p, 1.01 * p.R), OutOfDomain);
    CHECK_THROWS_AS(eval_profile(p, -0.1), OutOfDomain);
}

TEST_CASE("derivative bounds: sign, central limit, collapse as rho_c -> 1") {
    const StarProfile p = solve_profile({2, 2});
    const BoundReport b = derivative_bound_report(p);
    CHECK(b.lower_margin > 0);
    CHECK(b.upper_margin > 0);
    CHECK(p.dpgamma_over_r(0) == doctest::Approx(4 * kPi / 3 * 4).epsilon(1e-14));
    CHECK(-p.dpgamma(1) / p.r(1) == doctest::Approx(4 * kPi / 3 * 4).epsilon(1e-5));
    double prev = b.lower_margin;
    for (double rc : {1.1, 1.01, 1.001}) {
        const BoundReport q = derivative_bound_report(solve_profile({1.5, rc}));
        CHECK(q.holds());
        CHECK(q.lower_margin < prev);
        prev = q.lower_margin;
    }
    CHECK(prev < 0.01);
}
