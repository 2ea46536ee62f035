#include "liquidstar/harmonics.hpp"

#include <unsupported/Eigen/AutoDiff>

#include <algorithm>
#include <string>

#include "liquidstar/errors.hpp"
#include "liquidstar/quadrature.hpp"

namespace liquidstar {

namespace {

using AD = Eigen::AutoDiffScalar<Eigen::Vector3d>;
using Vec3AD = Eigen::Matrix<AD, 3, 1>;

Vec3AD seed(const Eigen::Vector3d& x) {
    Vec3AD xa;
    for (int i = 0; i < 3; ++i) xa(i) = AD(x(i), 3, i);
    return xa;
}

}  // namespace

double eval_ylm(int l, int m, const Eigen::Vector3d& dir) {
    if (std::abs(dir.norm() - 1) > 1e-12) throw BadDirection("direction is not a unit vector");
    return real_ylm<double>(l, m, dir);
}

Eigen::Vector3d ylm_gradient(int l, int m, const Eigen::Vector3d& x) {
    if (l == 0) return Eigen::Vector3d::Zero();
    if (x.squaredNorm() == 0) throw OriginSingular("grad Y_lm at the origin");
    return real_ylm<AD>(l, m, seed(x)).derivatives();
}

Eigen::Vector3d eval_vector_ylm(int kind, int l, int m, const Eigen::Vector3d& x) {
    const double r = x.norm();
    switch (kind) {
        case 0:
            if (r == 0) throw OriginSingular("radial unit vector undefined at the origin");
            return real_ylm<double>(l, m, x) * x / r;
        case 1:
            return r * ylm_gradient(l, m, x);
        case 2:
            return x.cross(ylm_gradient(l, m, x));
        default:
            throw std::invalid_argument("eval_vector_ylm: kind must be 0, 1 or 2");
    }
}

double solid_harmonic(int l, int m, const Eigen::Vector3d& x) {
    const double r = x.norm();
    if (r == 0) return l == 0 ? real_ylm<double>(0, 0, Eigen::Vector3d::UnitZ()) : 0.0;
    return std::pow(r, l) * real_ylm<double>(l, m, x);
}

Eigen::Vector3d solid_harmonic_gradient(int l, int m, const Eigen::Vector3d& x) {
    if (l == 0) return Eigen::Vector3d::Zero();
    if (x.squaredNorm() == 0) {
        if (l >= 2) return Eigen::Vector3d::Zero();
        // r Y_1m is linear: evaluate away from the origin.
        return solid_harmonic_gradient(l, m, Eigen::Vector3d(0.3, 0.5, 0.7));
    }
    const Vec3AD xa = seed(x);
    AD rl(1);
    const AD r = sqrt(xa.squaredNorm());
    for (int k = 0; k < l; ++k) rl = rl * r;
    return (rl * real_ylm<AD>(l, m, xa)).derivatives();
}

Eigen::Matrix3d solid_harmonic_hessian(int l, int m, const Eigen::Vector3d& x) {
    const double h = 1e-3 * std::max(x.norm(), 1e-3);
    Eigen::Matrix3d H;
    for (int j = 0; j < 3; ++j) {
        const Eigen::Vector3d e = Eigen::Vector3d::Unit(j) * h;
        H.col(j) = (-solid_harmonic_gradient(l, m, x + 2 * e) + 8 * solid_harmonic_gradient(l, m, x + e) -
                    8 * solid_harmonic_gradient(l, m, x - e) + solid_harmonic_gradient(l, m, x - 2 * e)) /
                   (12 * h);
    }
    return 0.5 * (H + H.transpose());
}

SphereRule sphere_rule(int degree) {
    const int nt = std::max(degree / 2 + 1, 1);
    const int np = std::max(degree + 1, 1);
    const GaussRule g = gauss_legendre(nt);
    SphereRule s;
    s.weights.resize(nt * np);
    s.nodes.reserve(nt * np);
    for (int i = 0; i < nt; ++i) {
        const double ct = g.x(i), st = std::sqrt(std::max(0.0, 1 - ct * ct));
        for (int j = 0; j < np; ++j) {
            const double ph = 2 * std::numbers::pi * (j + 0.5) / np;
            s.nodes.emplace_back(st * std::cos(ph), st * std::sin(ph), ct);
            s.weights(i * np + j) = g.w(i) * 2 * std::numbers::pi / np;
        }
    }
    return s;
}

double kernel_coeff(int l, double r, double s) {
    if (r < 0 || s < 0) throw std::invalid_argument("kernel_coeff: radii must be nonnegative");
    if (r == s) throw EqualRadii("kernel expansion undefined at r = s");
    const double lo = std::min(r, s), hi = std::max(r, s);
    return 4 * std::numbers::pi / (2 * l + 1) * std::pow(lo / hi, l) / hi;
}

void check_uniform_grid(const Eigen::VectorXd& r, double R) {
    const Eigen::Index n = r.size() - 1;
    if (n < 4 || r(0) != 0 || std::abs(r(n) - R) > 1e-12 * R)
        throw GridMismatch("grid must be uniform on [0, R] with at least 4 cells");
    const double h = R / n;
    for (Eigen::Index i = 0; i <= n; ++i)
        if (std::abs(r(i) - i * h) > 1e-9 * h) throw GridMismatch("grid is not uniform");
}

PotentialMode psi_from_g(int l, const RadialModeFunction& g, double R) {
    check_uniform_grid(g.r, R);
    const int n = static_cast<int>(g.r.size()) - 1;
    const double h = R / n;
    const GaussRule q = gauss_legendre(l / 2 + 4);

    // Scaled cumulative integrals; every recurrence factor is <= 1.
    Eigen::VectorXd jin(n + 1), jout(n + 1);
    jin(0) = 0;
    jout(n) = 0;
    Eigen::VectorXd cin(n), cout(n);
    for (int i = 0; i < n; ++i) {
        const int f = cubic_stencil(i, n);
        const double a = i * h, b = a + h;
        double si = 0, so = 0;
        for (int k = 0; k < q.x.size(); ++k) {
            const double y = a + 0.5 * h * (q.x(k) + 1);
            const double gy = lagrange4((y - f * h) / h).dot(g.values.segment<4>(f));
            const double w = 0.5 * h * q.w(k) * y * gy;
            si += w * std::pow(y / b, l + 1);
            so += (l == 0 ? w : (i == 0 ? 0.0 : w * std::pow(a / y, l)));
        }
        cin(i) = si;
        cout(i) = so;
    }
    for (int i = 0; i < n; ++i) {
        const double ratio = double(i) / (i + 1);
        jin(i + 1) = std::pow(ratio, l + 1) * jin(i) + cin(i);
    }
    for (int i = n - 1; i >= 0; --i) {
        const double ratio = i == 0 ? (l == 0 ? 1.0 : 0.0) : double(i) / (i + 1);
        jout(i) = std::pow(ratio, l) * jout(i + 1) + cout(i);
    }

    PotentialMode p;
    p.l = l;
    p.R = R;
    p.r = g.r;
    p.psi = -(jin + jout) / (2 * l + 1);
    p.dpsi.resize(n + 1);
    for (int i = 1; i <= n; ++i)
        p.dpsi(i) = ((l + 1) * jin(i) - l * jout(i)) / ((2 * l + 1) * g.r(i));
    if (l == 1) {
        // Psi'(0) = -(1/3) int_0^R g
        double s = 0;
        for (int i = 0; i < n; ++i) {
            const int f = cubic_stencil(i, n);
            for (int k = 0; k < q.x.size(); ++k) {
                const double y = i * h + 0.5 * h * (q.x(k) + 1);
                s += 0.5 * h * q.w(k) * lagrange4((y - f * h) / h).dot(g.values.segment<4>(f));
            }
        }
        p.dpsi(0) = -s / 3;
    } else {
        p.dpsi(0) = 0;
    }
    return p;
}

double PotentialMode::value(double x) const {
    if (x < R) throw OutOfDomain("PotentialMode::value is the exterior continuation");
    return psi(psi.size() - 1) * std::pow(R / x, l + 1);
}

double PotentialMode::derivative(double x) const {
    if (x < R) throw OutOfDomain("PotentialMode::derivative is the exterior continuation");
    return -(l + 1) * value(x) / x;
}

RadialModeFunction laplace_l(int l, const RadialModeFunction& psi) {
    const Eigen::Index n = psi.r.size() - 1;
    check_uniform_grid(psi.r, psi.r(n));
    const double h = psi.r(1);
    const Eigen::VectorXd d1 = derivative_uniform(psi.values, h);
    const Eigen::VectorXd d2 = derivative_uniform(d1, h);
    RadialModeFunction out{l, psi.r, Eigen::VectorXd(n + 1)};
    for (Eigen::Index i = 1; i <= n; ++i) {
        const double r = psi.r(i);
        out.values(i) = d2(i) + 2 * d1(i) / r - l * (l + 1) * psi.values(i) / (r * r);
    }
    const auto& v = out.values;
    out.values(0) = 4 * v(1) - 6 * v(2) + 4 * v(3) - v(4);
    return out;
}

double exterior_tail_norm(int l, double psiR, double R) {
    return double(l + 1) * (l + 1) * R / (2 * l + 1) * psiR * psiR;
}

double exterior_dirichlet_energy(int l, double psiR, double R) {
    return double(l + 1) * R * psiR * psiR;
}

}  // namespace liquidstar
