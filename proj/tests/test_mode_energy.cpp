#include <doctest.h>

#include <cmath>
#include <numbers>

#include "liquidstar/errors.hpp"
#include "liquidstar/mode_energy.hpp"
#include "liquidstar/quadrature.hpp"

using namespace liquidstar;

namespace {

constexpr double kPi = std::numbers::pi;

const StarProfile& gamma2() {
    static const StarProfile p = solve_profile({2, 2});
    return p;
}

const StarProfile& mid() {
    static const StarProfile p = solve_profile({1.5, 10});
    return p;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

ChiField poly(int l, const StarProfile& p, std::initializer_list<double> c, BoundaryCondition bc) {
    Eigen::VectorXd v(c.size());
    int i = 0;
    for (double x : c) v(i++) = x;
    return chi_from_polynomial(l, p, v, bc);
}

}  // namespace

TEST_CASE("g_from_chi: translation and the closed-form l = 2 witness") {
    const StarProfile& p = gamma2();
    const RadialModeFunction t = g_from_chi(poly(1, p, {1}, BoundaryCondition::NeumannAtR), p);
    CHECK((t.values - p.drho).cwiseAbs().maxCoeff() < 1e-14);

    // chi = r^2: g = r (rho r^2)' with rho = 2 sin(kr)/(kr).
    const double R = p.R, k = std::sqrt(2 * kPi);
    const RadialModeFunction g = g_from_chi(poly(2, p, {0, 0, R * R}, BoundaryCondition::None), p);
    double err = 0;
    for (Eigen::Index i = 0; i < p.r.size(); ++i) {
        const double r = p.r(i);
        err = std::max(err, std::abs(g.values(i) - r * (2 / k) * (std::sin(k * r) + k * r * std::cos(k * r))));
    }
    CHECK(err < 1e-6);
}

TEST_CASE("l = 0: chi from Psi' and back recovers g") {
    const StarProfile& p = mid();
    const RadialModeFunction g0 = g_from_chi(random_robin_chi(p, 11), p);
    const ChiField chi = chi_from_g(0, g0, p);
    const RadialModeFunction g1 = g_from_chi(chi, p);
    CHECK((g1.values - g0.values).cwiseAbs().maxCoeff() < 1e-7 * g0.values.cwiseAbs().maxCoeff());
    // l >= 1 inverse map as well.
    const ChiField c3 = random_neumann_chi(3, p, 5);
    const ChiField back = chi_from_g(3, g_from_chi(c3, p), p);
    CHECK((back.values - c3.values).cwiseAbs().maxCoeff() < 1e-7 * c3.values.cwiseAbs().maxCoeff());
}

TEST_CASE("energy_direct: zero field and translation zero mode") {
    const StarProfile& p = gamma2();
    RadialModeFunction z{1, p.r, Eigen::VectorXd::Zero(p.r.size())};
    const ModeEnergy e0 = energy_direct(1, 0, z, p);
    CHECK(e0.lambda == 0);
    CHECK(e0.gamma_term == 0);
    for (const StarProfile* q : {&gamma2(), &mid()}) {
        const RadialModeFunction g{1, q->r, q->drho};
        const ModeEnergy t = energy_direct(1, 0, g, *q);
        CHECK(std::abs(t.total) <= 1e-8 * t.g_l2);
    }
}

TEST_CASE("three routes agree on random Neumann fields") {
    const StarProfile& p = mid();
    double worst = 0;
    for (int l = 1; l <= 8; ++l)
        for (std::uint64_t s = 0; s < 5; ++s) {
            const ChiField chi = random_neumann_chi(l, p, 100 * l + s);
            const double d = energy_direct(l, 0, g_from_chi(chi, p), p).total;
            const double a = energy_chi_one(chi, p).total, b = energy_chi_two(chi, p).total;
            worst = std::max({worst, rel(d, a), rel(a, b), rel(d, b)});
            CHECK(b >= 0);
        }
    CHECK(worst < 1e-5);
    CHECK(worst < 1e-9);  // measured ~2e-11

    // Neumann witness t^2 - (2/3) t^3 on gamma = 2.
    const ChiField w = poly(2, gamma2(), {0, 0, 1, -2.0 / 3}, BoundaryCondition::NeumannAtR);
    CHECK(rel(energy_direct(2, 0, g_from_chi(w, gamma2()), gamma2()).total, energy_chi_two(w, gamma2()).total) < 1e-6);
    const ChiField zero = poly(2, gamma2(), {0}, BoundaryCondition::NeumannAtR);
    CHECK(energy_chi_one(zero, gamma2()).total == 0);
}

TEST_CASE("route deviation shrinks under grid doubling") {
    std::vector<double> dev;
    for (int n : {256, 512, 1024}) {
        SolverOptions o;
        o.grid_n = n;
        const StarProfile p = solve_profile({1.5, 10}, o);
        double worst = 0;
        for (int l : {1, 4, 8}) {
            const ChiField chi = random_neumann_chi(l, p, 7 + l);
            const double d = energy_direct(l, 0, g_from_chi(chi, p), p).total;
            worst = std::max(worst, rel(d, energy_chi_two(chi, p).total));
        }
        dev.push_back(worst);
    }
    CHECK(std::log2(dev[0] / dev[1]) >= 2);
    CHECK(std::log2(dev[1] / dev[2]) >= 2);
}

TEST_CASE("energy_chi_two closed values") {
    const StarProfile& p = mid();
    CHECK(std::abs(energy_chi_two(poly(1, p, {3}, BoundaryCondition::NeumannAtR), p).total) < 1e-14);
    // l = 2, chi = 1: -2 int (rho^gamma)' r^3 dr.
    Eigen::VectorXd f = p.dpgamma.cwiseProduct(p.r.array().cube().matrix());
    const double expected = -2 * simpson(f, p.h());
    const double got = energy_chi_two(poly(2, p, {1}, BoundaryCondition::NeumannAtR), p).total;
    CHECK(expected > 0);
    CHECK(got == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("radial energy") {
    const StarProfile& p = mid();
    CHECK(radial_energy(poly(0, p, {0}, BoundaryCondition::RadialRobin), p) == 0);
    // gamma = 4/3: only the gradient and boundary terms remain.
    const StarProfile q = solve_profile({4.0 / 3, 4});
    for (std::uint64_t s = 0; s < 5; ++s) {
        const ChiField chi = random_robin_chi(q, s);
        const Eigen::VectorXd f = (4.0 / 3) * q.r.array().pow(4) * q.rho.array().pow(4.0 / 3) * chi.derivs.array().square();
        const double R = q.R, cR = chi.values(q.cells());
        const double expected = simpson(f, q.h()) + 4 * R * R * R * cR * cR;
        CHECK(radial_energy(chi, q) == doctest::Approx(expected).epsilon(1e-12));
        CHECK(expected >= 0);
    }
    for (std::uint64_t s = 0; s < 5; ++s) {
        const RadialModeFunction g = g_from_chi(random_robin_chi(p, 50 + s), p);
        const double d = energy_direct(0, 0, g, p).total;
        CHECK(rel(d, radial_energy(chi_from_g(0, g, p), p)) < 1e-6);
    }
}

TEST_CASE("E norm") {
    const Eigen::VectorXd r = Eigen::VectorXd::LinSpaced(65, 0, 1);
    const ChiField one = chi_from_samples(0, r, Eigen::VectorXd::Ones(65), BoundaryCondition::None);
    CHECK(energy_norm_E(one, 1) == doctest::Approx(2.2).epsilon(1e-8));  // Simpson on r^4
    CHECK(energy_norm_E(chi_from_samples(0, r, Eigen::VectorXd::Zero(65), BoundaryCondition::None), 1) == 0);
    const Eigen::VectorXd v = r.array().sin().matrix();
    const double e1 = energy_norm_E(chi_from_samples(0, r, v, BoundaryCondition::None), 1);
    const double e2 = energy_norm_E(chi_from_samples(0, r, 2 * v, BoundaryCondition::None), 1);
    CHECK(e2 == doctest::Approx(4 * e1).epsilon(1e-14));
}

TEST_CASE("total_energy: empty, translation, additivity") {
    const StarProfile& p = mid();
    CHECK(total_energy({}, p).total == 0);
    const EnergyTable t = total_energy({{1, 0, poly(1, p, {1}, BoundaryCondition::NeumannAtR)}}, p);
    CHECK(std::abs(t.total) <= 1e-8 * t.modes[0].g_l2);
    const ChiField a = random_neumann_chi(2, p, 1), b = random_neumann_chi(5, p, 2);
    const ChiField c = random_robin_chi(p, 3);
    const RadialModeFunction g = g_from_chi(random_neumann_chi(3, p, 4), p);
    const EnergyTable m = total_energy({{2, 1, a}, {5, -3, b}, {0, 0, c}, {3, 2, g}}, p);
    const double sum = energy_chi_two(a, p).total + energy_chi_two(b, p).total + radial_energy(c, p) +
                       energy_direct(3, 2, g, p).total;
    CHECK(m.total == doctest::Approx(sum).epsilon(1e-14));
    CHECK(m.modes.size() == 4);
    CHECK(m.modes[1].m == -3);
    for (double d : m.route_delta) CHECK(d < 1e-6);
}

TEST_CASE("boundary-condition discipline") {
    const StarProfile& p = mid();
    const ChiField bad = poly(2, p, {0, 1}, BoundaryCondition::NeumannAtR);
    CHECK(bc_residual(bad) > 0.1);
    CHECK_THROWS_AS(require_bc(bad, BoundaryCondition::NeumannAtR), BcMismatch);
    CHECK_THROWS_AS(energy_chi_two(poly(2, p, {1}, BoundaryCondition::None), p), BcMismatch);
    CHECK_THROWS_AS(radial_energy(poly(0, p, {1}, BoundaryCondition::RadialRobin), p), BcMismatch);
    CHECK(bc_residual(random_robin_chi(p, 9)) < 1e-12);
    CHECK(bc_residual(random_neumann_chi(4, p, 9)) < 1e-12);
    const StarProfile& q = gamma2();
    CHECK_THROWS_AS(g_from_chi(random_neumann_chi(2, q, 1), p), GridMismatch);
}

TEST_CASE("upper and lower bound ratios over a random family") {
    const StarProfile& p = mid();
    for (int l = 2; l <= 8; ++l) {
        double lo = 1e300, hi = 0;
        for (std::uint64_t s = 0; s < 10; ++s) {
            const ChiField chi = random_neumann_chi(l, p, 1000 + 10 * l + s);
            const BoundRatios b = bound_ratios(energy_chi_two(chi, p), p);
            CHECK(std::isfinite(b.upper_ratio));
            CHECK(b.upper_norm > 0);
            lo = std::min(lo, b.lower_ratio);
            hi = std::max(hi, b.upper_ratio);
        }
        CHECK(lo > 0);
        CHECK(hi < 1e6);
    }
}

TEST_CASE("constant chi obstruction constant is -int rho dr, never zero") {
    for (const StarProfile* p : {&gamma2(), &mid()}) {
        const Obstruction o = constant_chi_obstruction(*p);
        CHECK(o.rho_integral > p->R);
        CHECK(o.c_value == doctest::Approx(-o.rho_integral).epsilon(1e-10));
        CHECK(std::abs(o.c_value) > 0);
    }
}
