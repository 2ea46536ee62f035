#include "liquidstar/analysis.hpp"

#include <unsupported/Eigen/AutoDiff>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include "liquidstar/errors.hpp"
#include "liquidstar/quadrature.hpp"

namespace liquidstar {

namespace {

constexpr double kPi = std::numbers::pi;
using AD = Eigen::AutoDiffScalar<Eigen::Vector3d>;

std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

// Profile with at most `cells` cells for 3D work (same equilibrium).
StarProfile coarse(const StarProfile& p, int cells) {
    if (p.cells() <= cells) return p;
    SolverOptions o;
    o.grid_n = cells;
    o.tol = p.tol > 0 ? p.tol : 1e-12;
    return solve_profile(p.params, o);
}

}  // namespace

double CheckReport::get(const std::string& key) const {
    for (const auto& [k, v] : values)
        if (k == key) return v;
    return std::numeric_limits<double>::quiet_NaN();
}

WitnessField WitnessField::translation(int axis) {
    if (axis < 0 || axis > 2) throw std::invalid_argument("translation axis must be 0, 1 or 2");
    WitnessField w;
    w.kind = Kind::Translation;
    w.axis = axis;
    return w;
}

WitnessField WitnessField::curl(const Eigen::Vector3d& center, double radius, std::uint64_t seed) {
    WitnessField w;
    w.kind = Kind::DivFreeCurl;
    w.center = center;
    w.radius = radius;
    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 10; ++k) w.coeffs(j, k) = u(rng);
    return w;
}

WitnessField WitnessField::curl_unit_z(const Eigen::Vector3d& center, double radius) {
    WitnessField w;
    w.kind = Kind::DivFreeCurl;
    w.center = center;
    w.radius = radius;
    w.coeffs(2, 0) = 1;
    return w;
}

WitnessField WitnessField::gradient_harmonic(int l, int m) {
    WitnessField w;
    w.kind = Kind::GradientHarmonic;
    w.l = l;
    w.m = m;
    return w;
}

namespace {

// A = bump(|u|) * sum_k c_jk mono_k(u), u = (x - center)/radius, on any scalar type.
template <class S>
Eigen::Matrix<S, 3, 1> bump_potential(const WitnessField& w, const Eigen::Matrix<S, 3, 1>& x) {
    Eigen::Matrix<S, 3, 1> u;
    for (int i = 0; i < 3; ++i) u(i) = (x(i) - w.center(i)) / w.radius;
    const S s2 = u.squaredNorm();
    const S b = exp(-1.0 / (1.0 - s2));
    const S mono[10] = {u(0) * 0 + 1, u(0), u(1), u(2), u(0) * u(0), u(1) * u(1), u(2) * u(2),
                        u(0) * u(1), u(1) * u(2), u(0) * u(2)};
    Eigen::Matrix<S, 3, 1> A;
    for (int j = 0; j < 3; ++j) {
        S a = u(0) * 0;
        for (int k = 0; k < 10; ++k)
            if (w.coeffs(j, k) != 0) a = a + w.coeffs(j, k) * mono[k];
        A(j) = b * a;
    }
    return A;
}

// The bump is below 1e-43 (with all its derivatives) past |u|^2 = 0.99; cutting there
// avoids 0 * inf in the derivative chain.
bool in_ball(const WitnessField& w, const Eigen::Vector3d& x) {
    return ((x - w.center) / w.radius).squaredNorm() < 0.99;
}

Eigen::Vector3d curl_potential(const WitnessField& w, const Eigen::Vector3d& x) {
    if (!in_ball(w, x)) return Eigen::Vector3d::Zero();
    Eigen::Matrix<AD, 3, 1> xa;
    for (int i = 0; i < 3; ++i) xa(i) = AD(x(i), 3, i);
    const auto A = bump_potential<AD>(w, xa);
    Eigen::Matrix3d J;  // J(j, k) = d_k A_j
    for (int j = 0; j < 3; ++j) J.row(j) = A(j).derivatives().transpose();
    return {J(2, 1) - J(1, 2), J(0, 2) - J(2, 0), J(1, 0) - J(0, 1)};
}

// div curl A from exact second derivatives (nested forward mode).
double curl_divergence(const WitnessField& w, const Eigen::Vector3d& x) {
    if (!in_ball(w, x)) return 0;
    using AD2 = Eigen::AutoDiffScalar<Eigen::Matrix<AD, 3, 1>>;
    Eigen::Matrix<AD2, 3, 1> xa;
    for (int i = 0; i < 3; ++i) {
        xa(i).value() = AD(x(i), 3, i);
        xa(i).derivatives() = Eigen::Matrix<AD, 3, 1>::Constant(AD(0, Eigen::Vector3d::Zero()));
        xa(i).derivatives()(i) = AD(1, Eigen::Vector3d::Zero());
    }
    const auto A = bump_potential<AD2>(w, xa);
    auto H = [&](int j, int a, int b) { return A(j).derivatives()(a).derivatives()(b); };
    // d_x(d_y A_z - d_z A_y) + d_y(d_z A_x - d_x A_z) + d_z(d_x A_y - d_y A_x)
    return H(2, 1, 0) - H(1, 2, 0) + H(0, 2, 1) - H(2, 0, 1) + H(1, 0, 2) - H(0, 1, 2);
}

}  // namespace

Eigen::Vector3d WitnessField::flux(const StarProfile& p, const Eigen::Vector3d& x) const {
    switch (kind) {
        case Kind::Translation:
            return eval_profile(p, x.norm()).rho * Eigen::Vector3d::Unit(axis);
        case Kind::GradientHarmonic:
            return eval_profile(p, x.norm()).rho * solid_harmonic_gradient(l, m, x);
        case Kind::DivFreeCurl:
            return curl_potential(*this, x);
    }
    return Eigen::Vector3d::Zero();
}

Eigen::Vector3d WitnessField::value(const StarProfile& p, const Eigen::Vector3d& x) const {
    return flux(p, x) / eval_profile(p, x.norm()).rho;
}

double WitnessField::divergence(const StarProfile& p, const Eigen::Vector3d& x) const {
    const double r = x.norm();
    switch (kind) {
        case Kind::Translation:
            return r == 0 ? 0.0 : eval_profile(p, r).drho * x(axis) / r;
        case Kind::GradientHarmonic:
            return r == 0 ? 0.0 : eval_profile(p, r).drho * l * solid_harmonic(l, m, x) / r;
        case Kind::DivFreeCurl:
            return curl_divergence(*this, x);
    }
    return 0;
}

std::vector<ModeSample> project_modes(const StarProfile& p,
                                      const std::function<double(const Eigen::Vector3d&)>& f,
                                      int lmax, int angular_degree) {
    const SphereRule s = sphere_rule(angular_degree);
    const Eigen::Index nq = s.weights.size();
    const int nm = (lmax + 1) * (lmax + 1);
    Eigen::MatrixXd Y(nm, nq);
    for (int l = 0, row = 0; l <= lmax; ++l)
        for (int m = -l; m <= l; ++m, ++row)
            for (Eigen::Index q = 0; q < nq; ++q) Y(row, q) = s.weights(q) * real_ylm<double>(l, m, s.nodes[q]);
    const Eigen::Index n = p.r.size();
    Eigen::MatrixXd G(nm, n);
    Eigen::VectorXd fv(nq);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index q = 0; q < nq; ++q) fv(q) = f(p.r(i) * s.nodes[q]);
        G.col(i) = Y * fv;
    }
    std::vector<ModeSample> out;
    for (int l = 0, row = 0; l <= lmax; ++l)
        for (int m = -l; m <= l; ++m, ++row)
            out.push_back({l, m, {l, p.r, G.row(row).transpose()}});
    return out;
}

EnergyTable field_energy(const StarProfile& p, const std::vector<ModeSample>& modes) {
    std::vector<ModeInput> in;
    for (const auto& s : modes) in.push_back({s.l, s.m, s.g});
    return total_energy(in, p);
}

CheckReport check_translation_zero(const StarProfile& p, int axis) {
    const WitnessField w = WitnessField::translation(axis);
    const auto modes = project_modes(p, [&](const Eigen::Vector3d& x) { return w.divergence(p, x); }, 4, 12);
    const EnergyTable t = field_energy(p, modes);
    double gnorm = 0, higher = 0, l1_err = 0;
    const int m_axis = axis == 2 ? 0 : (axis == 0 ? 1 : -1);
    const double c = std::sqrt(4 * kPi / 3);
    for (std::size_t k = 0; k < modes.size(); ++k) {
        gnorm += t.modes[k].g_l2;
        if (modes[k].l != 1) higher += t.modes[k].g_l2;
        if (modes[k].l == 1 && modes[k].m == m_axis)
            l1_err = (modes[k].g.values - c * p.drho).cwiseAbs().maxCoeff() / (c * p.drho.cwiseAbs().maxCoeff());
    }
    CheckReport r;
    r.check = "translations";
    r.set("axis", axis);
    r.set("energy", t.total);
    r.set("g_norm_sq", gnorm);
    r.set("relative_energy", std::abs(t.total) / gnorm);
    r.set("higher_l_fraction", higher / gnorm);
    r.set("l1_mode_error", l1_err);
    r.pass = std::abs(t.total) <= 1e-8 * gnorm && higher <= 1e-12 * gnorm && l1_err <= 1e-10;
    r.summary = "translation e_" + std::to_string(axis + 1) + ": |energy|/|g|^2 = " +
                num(std::abs(t.total) / gnorm);
    return r;
}

namespace {

struct KernelMeasure {
    double div_l2 = 0, flux_l2 = 0, theta_sq = 0, energy = 0;
};

struct Grid3 {
    StarProfile pc;
    SphereRule s;
    Eigen::VectorXd rw;  // Simpson weights times r^2
};

Grid3 make_grid(const StarProfile& p) {
    Grid3 g{coarse(p, 256), sphere_rule(48), {}};
    const Eigen::Index n = g.pc.r.size();
    g.rw = Eigen::VectorXd::Zero(n);
    const double h = g.pc.h();
    for (Eigen::Index i = 0; i + 2 < n; i += 2) {
        g.rw(i) += h / 3;
        g.rw(i + 1) += 4 * h / 3;
        g.rw(i + 2) += h / 3;
    }
    g.rw = g.rw.cwiseProduct(g.pc.r.cwiseAbs2());
    return g;
}

void check_ball(const StarProfile& p, const WitnessField& w) {
    if (!(w.radius > 0) || w.center.norm() + w.radius >= p.R)
        throw BallOutsideStar("witness ball must lie strictly inside the star");
}

KernelMeasure measure_kernel(const Grid3& g, const WitnessField& w) {
    KernelMeasure k;
    const StarProfile& p = g.pc;
    for (Eigen::Index i = 0; i < p.r.size(); ++i) {
        if (g.rw(i) == 0) continue;
        const double rho = p.rho(i);
        for (std::size_t q = 0; q < g.s.nodes.size(); ++q) {
            const Eigen::Vector3d x = p.r(i) * g.s.nodes[q];
            if (!in_ball(w, x)) continue;
            const double wt = g.rw(i) * g.s.weights(q);
            const Eigen::Vector3d f = w.flux(p, x);
            const double d = w.divergence(p, x);
            k.div_l2 += wt * d * d;
            k.flux_l2 += wt * f.squaredNorm();
            k.theta_sq += wt * f.squaredNorm() / rho;
        }
    }
    k.div_l2 = std::sqrt(k.div_l2);
    k.flux_l2 = std::sqrt(k.flux_l2);
    const auto modes = project_modes(p, [&](const Eigen::Vector3d& x) { return w.divergence(p, x); }, 12, 48);
    k.energy = field_energy(p, modes).total;
    return k;
}

void report_kernel(CheckReport& r, const KernelMeasure& k, const WitnessField& w, const std::string& tag) {
    const double rel = k.flux_l2 > 0 ? k.div_l2 * w.radius / k.flux_l2 : 0.0;
    r.set(tag + "div_rel", rel);
    r.set(tag + "energy", k.energy);
    r.set(tag + "theta_norm_sq", k.theta_sq);
}

bool kernel_ok(const KernelMeasure& k, const WitnessField& w) {
    const double rel = k.flux_l2 > 0 ? k.div_l2 * w.radius / k.flux_l2 : 0.0;
    return rel <= 1e-8 && std::abs(k.energy) <= 1e-8;
}

}  // namespace

CheckReport check_kernel_witness(const StarProfile& p, const WitnessField& w) {
    if (w.kind != WitnessField::Kind::DivFreeCurl) throw std::invalid_argument("kernel witness must be a curl field");
    check_ball(p, w);
    const Grid3 g = make_grid(p);
    const KernelMeasure k = measure_kernel(g, w);
    CheckReport r;
    r.check = "kernel";
    report_kernel(r, k, w, "");
    r.pass = kernel_ok(k, w);
    r.summary = "kernel witness: energy = " + num(k.energy);
    return r;
}

CheckReport check_kernel_pair(const StarProfile& p, const WitnessField& a, const WitnessField& b) {
    check_ball(p, a);
    check_ball(p, b);
    const Grid3 g = make_grid(p);
    const KernelMeasure ka = measure_kernel(g, a), kb = measure_kernel(g, b);
    // Gram matrix of the theta fields in the rho-weighted inner product.
    double g12 = 0;
    const StarProfile& pc = g.pc;
    for (Eigen::Index i = 0; i < pc.r.size(); ++i) {
        if (g.rw(i) == 0) continue;
        for (std::size_t q = 0; q < g.s.nodes.size(); ++q) {
            const Eigen::Vector3d x = pc.r(i) * g.s.nodes[q];
            if ((x - a.center).norm() >= a.radius || (x - b.center).norm() >= b.radius) continue;
            g12 += g.rw(i) * g.s.weights(q) * a.flux(pc, x).dot(b.flux(pc, x)) / pc.rho(i);
        }
    }
    const double det_rel = 1 - g12 * g12 / (ka.theta_sq * kb.theta_sq);
    CheckReport r;
    r.check = "kernel";
    report_kernel(r, ka, a, "a_");
    report_kernel(r, kb, b, "b_");
    r.set("gram_11", ka.theta_sq);
    r.set("gram_22", kb.theta_sq);
    r.set("gram_12", g12);
    r.set("gram_det_rel", det_rel);
    r.set("disjoint", (a.center - b.center).norm() > a.radius + b.radius ? 1 : 0);
    r.pass = kernel_ok(ka, a) && kernel_ok(kb, b) && ka.theta_sq > 0 && kb.theta_sq > 0 && det_rel > 1e-6;
    r.summary = "kernel pair: energies " + num(ka.energy) + ", " + num(kb.energy) +
                "; Gram determinant (relative) " + num(det_rel);
    return r;
}

CheckReport check_kernel_default(const StarProfile& p, std::uint64_t seed) {
    const double R = p.R;
    return check_kernel_pair(p, WitnessField::curl({0.4 * R, 0.1 * R, 0}, 0.25 * R, seed),
                             WitnessField::curl({-0.4 * R, 0, 0.1 * R}, 0.25 * R, seed + 1));
}

DerivativeFailure derivative_failure_ratio(const StarProfile& p, int l) {
    if (l < 2) throw std::invalid_argument("derivative_failure_ratio: l must be >= 2");
    const double R = p.R;
    DerivativeFailure d;
    d.l = l;
    d.num = double(l) * (l - 1) * (2 * l + 1) * std::pow(R, 2 * l - 1);
    RadialModeFunction g{l, p.r, Eigen::VectorXd(p.r.size())};
    for (Eigen::Index i = 0; i < p.r.size(); ++i) g.values(i) = l * p.drho(i) * std::pow(p.r(i), l - 1);
    d.den = energy_direct(l, 0, g, p).total;
    d.den_chi_two = energy_chi_two(chi_from_polynomial(l, p, Eigen::VectorXd::Constant(1, l),
                                                       BoundaryCondition::NeumannAtR), p).total;
    d.ratio = d.num / d.den;
    d.num_quadrature = std::numeric_limits<double>::quiet_NaN();
    d.boundary_rel = std::numeric_limits<double>::quiet_NaN();
    if (l <= 10) {
        const SphereRule s = sphere_rule(2 * l);
        const GaussRule q = gauss_legendre(l + 1);
        double num = 0;
        for (int k = 0; k < q.x.size(); ++k) {
            const double r = 0.5 * R * (q.x(k) + 1), wr = 0.5 * R * q.w(k) * r * r;
            for (std::size_t j = 0; j < s.nodes.size(); ++j)
                num += wr * s.weights(j) * solid_harmonic_hessian(l, 0, r * s.nodes[j]).squaredNorm();
        }
        d.num_quadrature = num;
        const double dR = p.drho(p.cells());
        double bnd = 0;
        for (std::size_t j = 0; j < s.nodes.size(); ++j) {
            const Eigen::Vector3d x = R * s.nodes[j];
            const double gv = dR * s.nodes[j].dot(solid_harmonic_gradient(l, 0, x));
            bnd += R * R * s.weights(j) * gv * gv;
        }
        const double exact = double(l) * l * dR * dR * std::pow(R, 2 * l);
        d.boundary_rel = std::abs(bnd - exact) / exact;
    }
    return d;
}

CheckReport check_derivative_failure(const StarProfile& p, const std::vector<int>& ls) {
    CheckReport r;
    r.check = "derivative-failure";
    bool increasing = true, quad_ok = true;
    double prev = -1, first = 0, last = 0;
    for (int l : ls) {
        const DerivativeFailure d = derivative_failure_ratio(p, l);
        const std::string t = "l" + std::to_string(l) + "_";
        r.set(t + "num", d.num);
        r.set(t + "den", d.den);
        r.set(t + "ratio", d.ratio);
        if (l <= 10) {
            r.set(t + "num_quadrature_rel", std::abs(d.num_quadrature / d.num - 1));
            r.set(t + "boundary_rel", d.boundary_rel);
            quad_ok = quad_ok && std::abs(d.num_quadrature / d.num - 1) <= 1e-6 && d.boundary_rel <= 1e-10;
        }
        if (prev >= 0 && !(d.ratio > prev)) increasing = false;
        if (prev < 0) first = d.ratio;
        prev = last = d.ratio;
    }
    r.set("growth", last / first);
    r.pass = increasing && quad_ok;
    r.summary = std::string("ratio ") + (increasing ? "strictly increasing" : "NOT increasing") +
                ", growth factor " + num(last / first);
    return r;
}

namespace {

// phi(r) = R^l sum_k a_k t^(l+2k), t = r/R; radial derivative and Delta^<l>.
struct PhiMode {
    int l = 0, m = 0;
    Eigen::VectorXd a;  // a_0..a_K
};

void eval_phi(const PhiMode& f, const StarProfile& p, Eigen::VectorXd& phi, Eigen::VectorXd& dphi,
              Eigen::VectorXd& lap) {
    const Eigen::Index n = p.r.size();
    const int l = f.l;
    const double R = p.R;
    phi = dphi = lap = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t = p.r(i) / R;
        for (Eigen::Index k = 0; k < f.a.size(); ++k) {
            const int e = l + 2 * static_cast<int>(k);
            phi(i) += f.a(k) * std::pow(R, l) * std::pow(t, e);
            if (e >= 1) dphi(i) += f.a(k) * std::pow(R, l - 1) * e * std::pow(t, e - 1);
            if (k >= 1) lap(i) += f.a(k) * std::pow(R, l - 2) * 2.0 * k * (2 * l + 2 * k + 1) * std::pow(t, e - 2);
        }
    }
}

}  // namespace

CheckReport check_irrotational_coercivity(const StarProfile& p, int samples, std::uint64_t seed,
                                          const IrrotationalOptions& opts) {
    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    std::uniform_int_distribution<int> pick_l(0, opts.lmax), pick_count(1, opts.max_modes);
    const double h = p.h(), R = p.R;
    const double c1 = std::sqrt(4 * kPi / 3);
    const double mass = 4 * kPi * simpson(p.rho.cwiseProduct(p.r.cwiseAbs2()), h);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int s = 0; s < samples; ++s) {
        std::map<std::pair<int, int>, PhiMode> modes;
        const int count = opts.only_l >= 0 ? 1 : pick_count(rng);
        for (int c = 0; c < count; ++c) {
            const int l = opts.only_l >= 0 ? opts.only_l : pick_l(rng);
            const int m = std::uniform_int_distribution<int>(-l, l)(rng);
            PhiMode& f = modes[{l, m}];
            f.l = l;
            f.m = m;
            if (f.a.size() == 0) f.a = Eigen::VectorXd::Zero(5);
            for (int k = 0; k < 5; ++k) f.a(k) += u(rng);
        }
        if (opts.translation != 0 && !modes.count({1, 0})) modes[{1, 0}] = {1, 0, Eigen::VectorXd::Zero(5)};
        double energy = 0, norm = 0;
        for (auto& [key, f] : modes) {
            const int l = f.l;
            // Delta^<l> phi (R) = 0 fixes a_1.
            double acc = 0;
            for (int k = 2; k < 5; ++k) acc += f.a(k) * 2.0 * k * (2 * l + 2 * k + 1);
            f.a(1) = -acc / (2.0 * (2 * l + 3));
            Eigen::VectorXd phi, dphi, lap;
            eval_phi(f, p, phi, dphi, lap);
            if (l == 1) {
                // Remove the translation component along this axis.
                Eigen::VectorXd w(p.r.size());
                for (Eigen::Index i = 0; i < p.r.size(); ++i)
                    w(i) = p.rho(i) * (dphi(i) * p.r(i) * p.r(i) + 2 * phi(i) * p.r(i));
                const double c = c1 * simpson(w, h) / mass;
                f.a(0) -= c * c1;
                if (f.m == 0) f.a(0) += opts.translation * c1;
                eval_phi(f, p, phi, dphi, lap);
            }
            RadialModeFunction g{l, p.r, p.drho.cwiseProduct(dphi) + p.rho.cwiseProduct(lap)};
            energy += energy_direct(l, f.m, g, p).total;
            Eigen::VectorXd nn = dphi.cwiseProduct(dphi).cwiseProduct(p.r.cwiseAbs2()) +
                                 double(l) * (l + 1) * phi.cwiseAbs2();
            norm += simpson(nn, h);
        }
        if (norm <= 0) continue;
        lo = std::min(lo, energy / norm);
        hi = std::max(hi, energy / norm);
    }
    (void)R;
    CheckReport r;
    r.check = "irrotational";
    r.set("samples", samples);
    r.set("min_ratio", lo);
    r.set("max_ratio", hi);
    r.pass = lo > 0;
    r.summary = "energy/|theta|^2 in [" + num(lo) + ", " + num(hi) + "]";
    return r;
}

CheckReport check_hardy_bound(const StarProfile& p, const std::vector<RadialModeFunction>& modes) {
    const double R = p.R, h = p.h();
    double grad = 0, gnorm = 0, ident = 0;
    for (const auto& g : modes) {
        const int l = g.l;
        const PotentialMode psi = psi_from_g(l, g, R);
        const Eigen::VectorXd r2 = p.r.cwiseAbs2();
        grad += simpson(psi.dpsi.cwiseAbs2().cwiseProduct(r2) + double(l) * (l + 1) * psi.psi.cwiseAbs2(), h) +
                exterior_dirichlet_energy(l, psi.psi(psi.psi.size() - 1), R);
        gnorm += simpson(g.values.cwiseAbs2().cwiseProduct(r2), h);
        ident -= simpson(psi.psi.cwiseProduct(g.values).cwiseProduct(r2), h);
    }
    const double bound = 4 * R * R * gnorm;
    CheckReport r;
    r.check = "hardy";
    r.set("grad_psi_sq", grad);
    r.set("bound", bound);
    r.set("ratio", bound > 0 ? grad / bound : 0.0);
    r.set("identity_rel", grad > 0 ? std::abs(ident - grad) / grad : 0.0);
    r.pass = grad <= bound;
    r.summary = "|grad Psi|^2 = " + num(grad) + " <= " + num(bound);
    return r;
}

std::vector<RadialModeFunction> random_multimode_g(const StarProfile& p, std::uint64_t seed, int lmax,
                                                   int max_modes) {
    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    const int count = std::uniform_int_distribution<int>(1, max_modes)(rng);
    std::vector<RadialModeFunction> out;
    for (int c = 0; c < count; ++c) {
        const int l = std::uniform_int_distribution<int>(0, lmax)(rng);
        const int deg = std::uniform_int_distribution<int>(0, 8)(rng);
        Eigen::VectorXd a(deg + 1);
        for (int k = 0; k <= deg; ++k) a(k) = u(rng);
        RadialModeFunction g{l, p.r, Eigen::VectorXd(p.r.size())};
        for (Eigen::Index i = 0; i < p.r.size(); ++i) {
            const double t = p.r(i) / p.R;
            double v = 0;
            for (int k = deg; k >= 0; --k) v = v * t + a(k);
            g.values(i) = v;
        }
        out.push_back(std::move(g));
    }
    return out;
}

}  // namespace liquidstar
