#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "liquidstar/harmonics.hpp"
#include "liquidstar/mode_energy.hpp"
#include "liquidstar/profile.hpp"

namespace liquidstar {

struct CheckReport {
    std::string check;
    bool pass = false;
    std::vector<std::pair<std::string, double>> values;
    std::string summary;

    double get(const std::string& key) const;
    void set(const std::string& key, double v) { values.emplace_back(key, v); }
};

// Displacement fields with closed-form evaluation.
struct WitnessField {
    enum class Kind { Translation, DivFreeCurl, GradientHarmonic };
    Kind kind = Kind::Translation;
    int axis = 2;                      // Translation: 0, 1, 2
    Eigen::Vector3d center = Eigen::Vector3d::Zero();  // DivFreeCurl
    double radius = 0;
    Eigen::Matrix<double, 3, 10> coeffs = Eigen::Matrix<double, 3, 10>::Zero();
    int l = 0, m = 0;                  // GradientHarmonic

    static WitnessField translation(int axis);
    // A = bump * random quadratic polynomial vector; theta = rho^-1 curl A.
    static WitnessField curl(const Eigen::Vector3d& center, double radius, std::uint64_t seed);
    // A = bump * e_z.
    static WitnessField curl_unit_z(const Eigen::Vector3d& center, double radius);
    static WitnessField gradient_harmonic(int l, int m);

    // rho theta at x (the mass flux the energy sees through its divergence).
    Eigen::Vector3d flux(const StarProfile& p, const Eigen::Vector3d& x) const;
    Eigen::Vector3d value(const StarProfile& p, const Eigen::Vector3d& x) const;
    // g = div(rho theta): closed form for Translation and GradientHarmonic, exact second
    // derivatives of A for DivFreeCurl.
    double divergence(const StarProfile& p, const Eigen::Vector3d& x) const;
};

// Modes g_lm(r) = int f(r n) Y_lm(n) dS on the profile grid, l <= lmax.
struct ModeSample {
    int l = 0, m = 0;
    RadialModeFunction g;
};
std::vector<ModeSample> project_modes(const StarProfile& p,
                                      const std::function<double(const Eigen::Vector3d&)>& f,
                                      int lmax, int angular_degree);

// Sum of per-mode energies of a scalar divergence field.
EnergyTable field_energy(const StarProfile& p, const std::vector<ModeSample>& modes);

CheckReport check_translation_zero(const StarProfile& p, int axis);

CheckReport check_kernel_witness(const StarProfile& p, const WitnessField& w);
// Two witnesses in disjoint balls plus the Gram determinant of their theta fields.
CheckReport check_kernel_pair(const StarProfile& p, const WitnessField& a, const WitnessField& b);
// Default disjoint pair used by the CLI.
CheckReport check_kernel_default(const StarProfile& p, std::uint64_t seed);

struct DerivativeFailure {
    int l = 0;
    double num = 0;             // |grad theta_l|^2, exact
    double den = 0;             // <L theta_l, theta_l>, direct route
    double den_chi_two = 0;     // same through chi = l
    double ratio = 0;
    double num_quadrature = 0;  // 3D quadrature (l <= 10), else NaN
    double boundary_rel = 0;    // relative mismatch of |div(rho theta)|^2 on the sphere (l <= 10)
};
DerivativeFailure derivative_failure_ratio(const StarProfile& p, int l);
// Passes when the ratio strictly increases over ls and the l <= 10 quadrature cross-checks
// hold; the growth factor last/first is reported.
CheckReport check_derivative_failure(const StarProfile& p, const std::vector<int>& ls = {4, 8, 16, 32});

struct IrrotationalOptions {
    int lmax = 12;
    int max_modes = 6;
    double translation = 0;  // amplitude of a retained e_z component (0: project out)
    int only_l = -1;         // >= 0: single (l, m) mode per sample
};
CheckReport check_irrotational_coercivity(const StarProfile& p, int samples, std::uint64_t seed,
                                          const IrrotationalOptions& opts = {});

// |grad Psi|^2 over R^3 (interior plus full exterior energy) against (2R |g|)^2.
CheckReport check_hardy_bound(const StarProfile& p, const std::vector<RadialModeFunction>& modes);
std::vector<RadialModeFunction> random_multimode_g(const StarProfile& p, std::uint64_t seed,
                                                   int lmax = 12, int max_modes = 6);

}  // namespace liquidstar
