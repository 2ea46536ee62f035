#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace liquidstar {

// Real spherical harmonic Y_lm at x/|x| (no Condon-Shortley phase):
// m > 0 ~ cos(m phi), m < 0 ~ sin(|m| phi). Templated on the scalar so that
// Eigen::AutoDiffScalar yields exact gradients.
template <class Scalar>
Scalar real_ylm(int l, int m, const Eigen::Matrix<Scalar, 3, 1>& x) {
    using std::sqrt;
    const int am = std::abs(m);
    if (l < 0 || am > l) throw std::invalid_argument("real_ylm: need |m| <= l");
    const Scalar r = sqrt(x.squaredNorm());
    const Scalar cx = x(0) / r, sy = x(1) / r, z = x(2) / r;
    // Re/Im of ((x + i y)/r)^|m| carry the sin^|m| theta factor.
    Scalar c(1), s(0);
    for (int k = 0; k < am; ++k) {
        const Scalar cn = c * cx - s * sy;
        s = c * sy + s * cx;
        c = cn;
    }
    double qmm = 1 / std::sqrt(4 * std::numbers::pi);
    for (int k = 1; k <= am; ++k) qmm *= std::sqrt((2.0 * k + 1) / (2.0 * k));
    Scalar q0(qmm);
    Scalar q = q0;
    if (l > am) {
        Scalar q1 = z * std::sqrt(2.0 * am + 3) * q0;
        for (int j = am + 2; j <= l; ++j) {
            const double a = std::sqrt((4.0 * j * j - 1) / (double(j) * j - double(am) * am));
            const double b = std::sqrt((double(j - 1) * (j - 1) - double(am) * am) /
                                       (4.0 * (j - 1) * (j - 1) - 1));
            const Scalar q2 = a * (z * q1 - b * q0);
            q0 = q1;
            q1 = q2;
        }
        q = q1;
    }
    if (m == 0) return q;
    return std::numbers::sqrt2 * q * (m > 0 ? c : s);
}

// Y_lm on a unit direction; throws BadDirection if | |dir| - 1 | > 1e-12.
double eval_ylm(int l, int m, const Eigen::Vector3d& dir);

// Gradient of Y_lm(x/|x|) at x != 0.
Eigen::Vector3d ylm_gradient(int l, int m, const Eigen::Vector3d& x);

// kind 0: Y e_r, kind 1: r grad Y, kind 2: x cross grad Y.
Eigen::Vector3d eval_vector_ylm(int kind, int l, int m, const Eigen::Vector3d& x);

// Solid harmonic r^l Y_lm, its gradient (exact) and Hessian (fourth-order differences
// of the exact gradient).
double solid_harmonic(int l, int m, const Eigen::Vector3d& x);
Eigen::Vector3d solid_harmonic_gradient(int l, int m, const Eigen::Vector3d& x);
Eigen::Matrix3d solid_harmonic_hessian(int l, int m, const Eigen::Vector3d& x);

// Product Gauss-Legendre (cos theta) x uniform (phi) rule, exact for polynomials
// of degree <= `degree` on the unit sphere.
struct SphereRule {
    std::vector<Eigen::Vector3d> nodes;
    Eigen::VectorXd weights;
};
SphereRule sphere_rule(int degree);

// 4 pi/(2l+1) min^l / max^(l+1).
double kernel_coeff(int l, double r, double s);

// Samples of a radial mode function on a uniform grid r_i = i R/n.
struct RadialModeFunction {
    int l = 0;
    Eigen::VectorXd r, values;
};

// Per-mode potential: interior samples plus the exact exterior continuation.
struct PotentialMode {
    int l = 0;
    double R = 0;
    Eigen::VectorXd r, psi, dpsi;

    double value(double x) const;       // exterior only (x >= R)
    double derivative(double x) const;  // exterior only (x >= R)
    RadialModeFunction interior() const { return {l, r, psi}; }
};

PotentialMode psi_from_g(int l, const RadialModeFunction& g, double R);

RadialModeFunction laplace_l(int l, const RadialModeFunction& psi);

// (l+1)^2 R/(2l+1) Psi(R)^2: the radial part of the exterior Dirichlet energy.
double exterior_tail_norm(int l, double psiR, double R);
// (l+1) R Psi(R)^2: the full exterior Dirichlet energy, including the angular part
// l(l+1) int_R^inf Psi^2 dr.
double exterior_dirichlet_energy(int l, double psiR, double R);

// Throws GridMismatch unless r is uniform on [0, R].
void check_uniform_grid(const Eigen::VectorXd& r, double R);

}  // namespace liquidstar
