#include <doctest.h>

#include <cmath>

#include "liquidstar/analysis.hpp"
#include "liquidstar/errors.hpp"

using namespace liquidstar;

namespace {

const StarProfile& gamma2() {
    static const StarProfile p = solve_profile({2, 2});
    return p;
}

const StarProfile& coarse_mid() {
    static const StarProfile p = [] {
        SolverOptions o;
        o.grid_n = 512;
        return solve_profile({1.5, 10}, o);
    }();
    return p;
}

}  // namespace

TEST_CASE("translations are zero modes carried by l = 1") {
    const StarProfile& p = gamma2();
    double mag[3];
    for (int axis = 0; axis < 3; ++axis) {
        const CheckReport r = check_translation_zero(p, axis);
        CHECK(r.pass);
        CHECK(r.get("relative_energy") <= 1e-8);
        CHECK(r.get("higher_l_fraction") < 1e-20);
        mag[axis] = r.get("g_norm_sq");
    }
    CHECK(mag[0] == doctest::Approx(mag[2]).epsilon(1e-12));
    CHECK(mag[1] == doctest::Approx(mag[2]).epsilon(1e-12));
    for (double g : {1.0, 1.2, 1.8})
        for (double rc : {1.05, 20.0}) {
            SolverOptions o;
            o.grid_n = 512;
            CHECK(check_translation_zero(solve_profile({g, rc}, o), 2).pass);
        }
    CHECK_THROWS(WitnessField::translation(3));
}

TEST_CASE("perturbed translation: energy is quadratic in the perturbation") {
    const StarProfile& p = coarse_mid();
    const WitnessField t = WitnessField::translation(2), h = WitnessField::gradient_harmonic(2, 0);
    auto energy = [&](double eps) {
        const auto modes = project_modes(
            p, [&](const Eigen::Vector3d& x) { return t.divergence(p, x) + eps * h.divergence(p, x); }, 4, 12);
        return field_energy(p, modes).total;
    };
    const auto hm = project_modes(p, [&](const Eigen::Vector3d& x) { return h.divergence(p, x); }, 4, 12);
    const double e2 = field_energy(p, hm).total;
    CHECK(e2 > 0);
    for (double eps : {0.1, 0.01}) CHECK(energy(eps) == doctest::Approx(eps * eps * e2).epsilon(1e-6));
}

TEST_CASE("witness fields evaluate as advertised") {
    const StarProfile& p = gamma2();
    const Eigen::Vector3d x(0.1, -0.2, 0.15);
    CHECK((WitnessField::translation(1).value(p, x) - Eigen::Vector3d::UnitY()).norm() < 1e-15);
    const WitnessField g = WitnessField::gradient_harmonic(3, -2);
    CHECK((g.value(p, x) - solid_harmonic_gradient(3, -2, x)).norm() < 1e-14);
    // div(rho grad(r^l Y)) = rho' l r^(l-1) Y since the solid harmonic is harmonic.
    const double r = x.norm();
    CHECK(g.divergence(p, x) == doctest::Approx(eval_profile(p, r).drho * 3 * solid_harmonic(3, -2, x) / r));
}

TEST_CASE("kernel witnesses: divergence-free, zero energy, independent") {
    const StarProfile& p = gamma2();
    const CheckReport z = check_kernel_witness(p, WitnessField::curl_unit_z({0, 0, 0}, p.R / 4));
    CHECK(z.pass);
    CHECK(std::abs(z.get("energy")) <= 1e-8);
    CHECK(z.get("div_rel") <= 1e-8);
    CHECK(z.get("theta_norm_sq") > 0);

    WitnessField zero = WitnessField::curl_unit_z({0, 0, 0}, p.R / 4);
    zero.coeffs.setZero();
    const CheckReport e = check_kernel_witness(p, zero);
    CHECK(e.get("energy") == 0);
    CHECK(e.get("theta_norm_sq") == 0);

    const CheckReport pair = check_kernel_default(coarse_mid(), 5);
    CHECK(pair.pass);
    CHECK(pair.get("disjoint") == 1);
    CHECK(pair.get("gram_det_rel") > 1e-6);

    CHECK_THROWS_AS(check_kernel_witness(p, WitnessField::curl({0.6 * p.R, 0, 0}, 0.5 * p.R, 1)), BallOutsideStar);
}

TEST_CASE("derivative-failure ratio") {
    // l = 2: 10 R^3 (10 at R = 1).
    const StarProfile& p = coarse_mid();
    const DerivativeFailure d2 = derivative_failure_ratio(p, 2);
    CHECK(d2.num == doctest::Approx(10 * std::pow(p.R, 3)).epsilon(1e-14));
    CHECK(std::abs(d2.num_quadrature / d2.num - 1) < 1e-6);
    const CheckReport r = check_derivative_failure(p);
    CHECK(r.pass);
    CHECK(r.get("l4_boundary_rel") < 1e-10);
    CHECK(r.get("l8_num_quadrature_rel") < 1e-6);
    CHECK(r.get("l32_ratio") > r.get("l16_ratio"));
    const DerivativeFailure d8 = derivative_failure_ratio(p, 8);
    CHECK(d8.den == doctest::Approx(d8.den_chi_two).epsilon(1e-6));
    CHECK_THROWS(derivative_failure_ratio(p, 1));
}

TEST_CASE("irrotational coercivity") {
    SolverOptions o;
    o.grid_n = 512;
    const StarProfile p = solve_profile({1.6, 3}, o);
    const CheckReport r = check_irrotational_coercivity(p, 64, 1);
    CHECK(r.pass);
    CHECK(r.get("min_ratio") > 0);

    // Retaining a translation drives the ratio toward zero.
    double prev = r.get("min_ratio");
    for (double k : {1.0, 10.0, 100.0}) {
        IrrotationalOptions opt;
        opt.translation = k;
        opt.max_modes = 2;
        const double m = check_irrotational_coercivity(p, 16, 9, opt).get("min_ratio");
        CHECK(m < prev);
        prev = m;
    }
    CHECK(prev < 1e-2);

    IrrotationalOptions five;
    five.only_l = 5;
    const CheckReport s = check_irrotational_coercivity(p, 32, 2, five);
    CHECK(s.pass);
    CHECK(s.get("max_ratio") / s.get("min_ratio") < 20);  // measured 10.8
}

TEST_CASE("Hardy bound") {
    // R = 1 grid and g = 1 in l = 0: |grad Psi|^2 = 1/45 + 1/9.
    StarProfile unit;
    unit.R = 1;
    unit.r = Eigen::VectorXd::LinSpaced(513, 0, 1);
    RadialModeFunction one{0, unit.r, Eigen::VectorXd::Ones(513)};
    const CheckReport c = check_hardy_bound(unit, {one});
    CHECK(c.get("grad_psi_sq") == doctest::Approx(1.0 / 45 + 1.0 / 9).epsilon(1e-12));
    CHECK(c.get("bound") == doctest::Approx(4.0 / 3).epsilon(1e-12));  // 4 R^2 int r^2 dr
    CHECK(c.get("identity_rel") < 1e-10);
    CHECK(c.pass);

    RadialModeFunction zero{3, unit.r, Eigen::VectorXd::Zero(513)};
    const CheckReport z = check_hardy_bound(unit, {zero});
    CHECK(z.get("grad_psi_sq") == 0);
    CHECK(z.pass);

    const StarProfile& p = coarse_mid();
    for (std::uint64_t s = 0; s < 20; ++s) {
        const CheckReport r = check_hardy_bound(p, random_multimode_g(p, s));
        CHECK(r.pass);
        CHECK(r.get("identity_rel") < 1e-6);  // 512 cells, l up to 12
    }
}
