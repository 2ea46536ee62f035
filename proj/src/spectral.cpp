#include "liquidstar/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <thread>

#include "liquidstar/errors.hpp"
#include "liquidstar/quadrature.hpp"

namespace liquidstar {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

DiscreteOperator skeleton(const StarProfile& p, int l, int n) {
    if (n < 64) throw SingularAssembly("need at least 64 cells (got " + std::to_string(n) + ")");
    DiscreteOperator op;
    op.l = l;
    op.radial = (l == 0);
    op.gamma = p.params.gamma;
    op.rho_c = p.params.rho_c;
    op.R = p.R;
    op.n = n;
    op.nodes = Eigen::VectorXd::LinSpaced(n + 1, 0, p.R);
    op.constraints.resize(0, n + 1);
    return op;
}

void add_row(DiscreteOperator& op, Eigen::VectorXd row, const std::string& name) {
    row /= row.norm();
    op.constraints.conservativeResize(op.constraints.rows() + 1, op.n + 1);
    op.constraints.row(op.constraints.rows() - 1) = row.transpose();
    op.constraint_names.push_back(name);
}

// Three-point one-sided chi'(R) functional.
Eigen::VectorXd boundary_slope(int n, double h) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n + 1);
    row(n) = 1.5 / h;
    row(n - 1) = -2 / h;
    row(n - 2) = 0.5 / h;
    return row;
}

// Element loop: `local` returns the 2x2 stiffness and mass contributions of one
// quadrature point (weight already applied by the caller).
void assemble(DiscreteOperator& op, int ng,
              const std::function<void(double r, double w, const double phi[2], const double dphi[2],
                                       Eigen::Matrix2d& a, Eigen::Matrix2d& b)>& point) {
    const int n = op.n;
    const double h = op.R / n;
    const GaussRule q = gauss_legendre(ng);
    Triplets ta, tb;
    ta.reserve(4 * n + 1);
    tb.reserve(4 * n + 1);
    for (int e = 0; e < n; ++e) {
        Eigen::Matrix2d a = Eigen::Matrix2d::Zero(), b = Eigen::Matrix2d::Zero();
        for (int k = 0; k < ng; ++k) {
            const double t = 0.5 * (q.x(k) + 1);
            const double r = (e + t) * h;
            const double w = 0.5 * h * q.w(k);
            const double phi[2] = {1 - t, t};
            const double dphi[2] = {-1 / h, 1 / h};
            point(r, w, phi, dphi, a, b);
        }
        // Exact symmetry by construction.
        a(1, 0) = a(0, 1);
        b(1, 0) = b(0, 1);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                ta.emplace_back(e + i, e + j, a(i, j));
                tb.emplace_back(e + i, e + j, b(i, j));
            }
    }
    op.stiffness.resize(n + 1, n + 1);
    op.mass.resize(n + 1, n + 1);
    op.stiffness.setFromTriplets(ta.begin(), ta.end());
    op.mass.setFromTriplets(tb.begin(), tb.end());
}

}  // namespace

DiscreteOperator assemble_radial(const StarProfile& p, int n, const AssemblyOptions& opts) {
    DiscreteOperator op = skeleton(p, 0, n);
    const double g = p.params.gamma, R = p.R;
    assemble(op, 5, [&](double r, double w, const double phi[2], const double dphi[2],
                        Eigen::Matrix2d& a, Eigen::Matrix2d& b) {
        const ProfileSample s = eval_profile(p, r);
        const double r3 = r * r * r, r4 = r3 * r;
        const double ka = w * g * r4 * std::pow(s.rho, g), kb = w * (4 - 3 * g) * r3 * s.dpgamma;
        for (int i = 0; i < 2; ++i)
            for (int j = i; j < 2; ++j) {
                a(i, j) += ka * dphi[i] * dphi[j] + kb * phi[i] * phi[j];
                b(i, j) += w * r4 * (dphi[i] * dphi[j] + phi[i] * phi[j]);
            }
    });
    op.stiffness.coeffRef(n, n) += 3 * g * R * R * R;
    op.mass.coeffRef(n, n) += R * R * R + R * R * R * R;
    if (opts.boundary == BoundaryRows::Imposed) {
        Eigen::VectorXd row = R * boundary_slope(n, R / n);
        row(n) += 3;
        add_row(op, row, "robin");
    }
    return op;
}

DiscreteOperator assemble_mode(const StarProfile& p, int l, int n, const AssemblyOptions& opts) {
    if (l < 1) throw std::invalid_argument("assemble_mode: l must be >= 1");
    DiscreteOperator op = skeleton(p, l, n);
    const double g = p.params.gamma, R = p.R;
    op.form_scale = std::pow(R, 2 * l);
    assemble(op, l + 4, [&](double r, double w, const double phi[2], const double dphi[2],
                            Eigen::Matrix2d& a, Eigen::Matrix2d& b) {
        const ProfileSample s = eval_profile(p, r);
        const double wt = w * std::pow(r / R, 2 * l);
        const double ka = wt * g * std::pow(s.rho, g);
        const double kb = wt * 2.0 * (l - 1) * eval_dpgamma_over_r(p, r);
        double gphi[2];
        for (int i = 0; i < 2; ++i) gphi[i] = s.drho * phi[i] + s.rho * dphi[i];
        for (int i = 0; i < 2; ++i)
            for (int j = i; j < 2; ++j) {
                a(i, j) += ka * dphi[i] * dphi[j] + kb * phi[i] * phi[j];
                b(i, j) += wt * gphi[i] * gphi[j];
            }
    });
    op.mass.coeffRef(n, n) += 1;
    if (opts.boundary == BoundaryRows::Imposed) add_row(op, boundary_slope(n, R / n), "neumann");
    if (l == 1 && opts.orthogonality) {
        const GaussRule q = gauss_legendre(5);
        const double h = R / n;
        Eigen::VectorXd row = Eigen::VectorXd::Zero(n + 1);
        for (int e = 0; e < n; ++e)
            for (int k = 0; k < 5; ++k) {
                const double t = 0.5 * (q.x(k) + 1), r = (e + t) * h;
                const double v = 0.5 * h * q.w(k) * eval_profile(p, r).rho * r * r;
                row(e) += v * (1 - t);
                row(e + 1) += v * t;
            }
        add_row(op, row, "orthogonality");
    }
    return op;
}

DiscreteOperator make_operator(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                               const Eigen::MatrixXd& C) {
    if (A.rows() != A.cols() || B.rows() != A.rows() || B.cols() != A.cols())
        throw std::invalid_argument("make_operator: A and B must be square of equal size");
    DiscreteOperator op;
    op.n = static_cast<int>(A.rows()) - 1;
    op.stiffness = A.sparseView();
    op.mass = B.sparseView();
    op.constraints = C.size() ? C : Eigen::MatrixXd(0, A.rows());
    op.constraint_names.assign(op.constraints.rows(), "row");
    op.nodes = Eigen::VectorXd::LinSpaced(A.rows(), 0, 1);
    op.R = 1;
    return op;
}

std::string sign_name(Sign s) {
    switch (s) {
        case Sign::Positive: return "positive";
        case Sign::Zero: return "zero";
        case Sign::Negative: return "negative";
    }
    return "?";
}

namespace {

double inf_norm(const Eigen::SparseMatrix<double>& M) {
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(M.rows());
    for (int k = 0; k < M.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(M, k); it; ++it)
            rows(it.row()) += std::abs(it.value());
    return rows.maxCoeff();
}

// Orthonormal basis of the constraint kernel, applied through Householder reflectors.
struct Projector {
    Eigen::Index n, k;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr;

    explicit Projector(const Eigen::MatrixXd& C) : n(C.cols()), k(C.rows()) {
        if (k > 0) {
            qr.compute(C.transpose());
            const Eigen::VectorXd d = qr.matrixQR().diagonal().head(k).cwiseAbs();
            if (d.minCoeff() <= 1e-12 * d.maxCoeff())
                throw SingularAssembly("constraint rows are linearly dependent");
        }
    }
    Eigen::MatrixXd project(const Eigen::MatrixXd& M) const {
        if (k == 0) return M;
        Eigen::MatrixXd T = qr.householderQ().adjoint() * M;
        T = T * qr.householderQ();
        return T.bottomRightCorner(n - k, n - k);
    }
    Eigen::MatrixXd lift(const Eigen::MatrixXd& Y) const {
        if (k == 0) return Y;
        Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, Y.cols());
        X.bottomRows(n - k) = Y;
        return qr.householderQ() * X;
    }
};

void normalize_sign(Eigen::VectorXd& v) {
    Eigen::Index i;
    v.cwiseAbs().maxCoeff(&i);
    if (v(i) < 0) v = -v;
}

Sign classify(double lambda, double band) {
    if (std::abs(lambda) <= band) return Sign::Zero;
    return lambda > 0 ? Sign::Positive : Sign::Negative;
}

struct Reduced {
    Eigen::MatrixXd A, B;
    Eigen::VectorXd scale;
};

Reduced reduce(const DiscreteOperator& opd, const Projector& P) {
    Reduced r;
    r.A = P.project(Eigen::MatrixXd(opd.stiffness));
    r.B = P.project(Eigen::MatrixXd(opd.mass));
    r.scale = r.B.diagonal().cwiseAbs().cwiseSqrt().cwiseInverse();
    if (!r.scale.allFinite()) throw SingularAssembly("mass matrix has a vanishing diagonal");
    r.A = r.scale.asDiagonal() * r.A * r.scale.asDiagonal();
    r.B = r.scale.asDiagonal() * r.B * r.scale.asDiagonal();
    return r;
}

SpectralResult dense_min(const DiscreteOperator& opd, double band) {
    const Projector P(opd.constraints);
    const Reduced red = reduce(opd, P);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
        red.A, red.B, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success) throw NoConvergence("dense generalized eigensolver failed");
    const double na = red.A.cwiseAbs().rowwise().sum().maxCoeff();
    const double nb = red.B.cwiseAbs().rowwise().sum().maxCoeff();
    const double lam0 = es.eigenvalues()(0);

    // Eigenvector by inverse iteration just below the computed eigenvalue.
    const double shift = lam0 - 1e-9 * (std::abs(lam0) + na / nb);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(red.A - shift * red.B);
    Eigen::VectorXd y = Eigen::VectorXd::Ones(red.A.rows());
    for (int it = 0; it < 20; ++it) {
        Eigen::VectorXd z = lu.solve(red.B * y);
        z /= std::sqrt(z.dot(red.B * z));
        if (z.dot(red.B * y) < 0) z = -z;
        const Eigen::VectorXd d = z - y;
        y = z;
        if (std::sqrt(std::abs(d.dot(red.B * d))) <= 1e-10) break;
    }
    SpectralResult out;
    out.lambda_min = lam0;
    out.residual = (red.A * y - lam0 * (red.B * y)).norm() / ((na + std::abs(lam0) * nb) * y.norm());
    Eigen::VectorXd v = P.lift(red.scale.asDiagonal() * y);
    v /= std::sqrt(v.dot(opd.mass * v));
    normalize_sign(v);
    out.eigvec = v;
    out.zero_band = band;
    out.classification = classify(out.lambda_min, band);
    out.dense = true;
    return out;
}

// Symmetric tridiagonal pencil solved by Sturm counts and inverse iteration; the
// constraint rows enter through the Schur complement of the saddle-point system.
struct Tridiagonal {
    Eigen::VectorXd ad, ae, bd, be;  // diagonals and first off-diagonals of A and B

    explicit Tridiagonal(const DiscreteOperator& op) {
        const Eigen::Index n = op.stiffness.rows();
        ad = Eigen::VectorXd::Zero(n);
        bd = Eigen::VectorXd::Zero(n);
        ae = Eigen::VectorXd::Zero(n - 1);
        be = Eigen::VectorXd::Zero(n - 1);
        auto load = [n](const Eigen::SparseMatrix<double>& M, Eigen::VectorXd& d, Eigen::VectorXd& e) {
            for (int k = 0; k < M.outerSize(); ++k)
                for (Eigen::SparseMatrix<double>::InnerIterator it(M, k); it; ++it) {
                    const Eigen::Index i = it.row(), j = it.col();
                    if (i == j) d(i) = it.value();
                    else if (i == j + 1) e(j) = it.value();
                    else if (std::abs(i - j) > 1)
                        throw std::logic_error("sparse eigensolver needs a tridiagonal pencil");
                }
            (void)n;
        };
        load(op.stiffness, ad, ae);
        load(op.mass, bd, be);
    }

    Eigen::Index size() const { return ad.size(); }

    // LDL^T of A - sigma B; returns the number of negative pivots.
    Eigen::Index factor(double sigma, Eigen::VectorXd& D, Eigen::VectorXd& L) const {
        const Eigen::Index n = size();
        D.resize(n);
        L.resize(n - 1);
        Eigen::Index neg = 0;
        const double tiny = 1e-300;
        D(0) = ad(0) - sigma * bd(0);
        if (D(0) == 0) D(0) = tiny;
        if (D(0) < 0) ++neg;
        for (Eigen::Index i = 1; i < n; ++i) {
            const double e = ae(i - 1) - sigma * be(i - 1);
            L(i - 1) = e / D(i - 1);
            D(i) = ad(i) - sigma * bd(i) - L(i - 1) * e;
            if (D(i) == 0) D(i) = tiny;
            if (D(i) < 0) ++neg;
        }
        return neg;
    }

    static Eigen::MatrixXd solve(const Eigen::VectorXd& D, const Eigen::VectorXd& L, Eigen::MatrixXd X) {
        const Eigen::Index n = D.size();
        for (Eigen::Index i = 1; i < n; ++i) X.row(i) -= L(i - 1) * X.row(i - 1);
        for (Eigen::Index i = 0; i < n; ++i) X.row(i) /= D(i);
        for (Eigen::Index i = n - 2; i >= 0; --i) X.row(i) -= L(i) * X.row(i + 1);
        return X;
    }

    Eigen::VectorXd mul_b(const Eigen::VectorXd& x) const {
        Eigen::VectorXd y = bd.cwiseProduct(x);
        y.head(size() - 1) += be.cwiseProduct(x.tail(size() - 1));
        y.tail(size() - 1) += be.cwiseProduct(x.head(size() - 1));
        return y;
    }
    Eigen::VectorXd mul_a(const Eigen::VectorXd& x) const {
        Eigen::VectorXd y = ad.cwiseProduct(x);
        y.head(size() - 1) += ae.cwiseProduct(x.tail(size() - 1));
        y.tail(size() - 1) += ae.cwiseProduct(x.head(size() - 1));
        return y;
    }
};

SpectralResult sparse_min(const DiscreteOperator& opd, double band, int max_iter) {
    const Tridiagonal T(opd);
    const Eigen::MatrixXd& C = opd.constraints;
    const Eigen::Index k = C.rows();
    Eigen::VectorXd D, L;

    // Number of constrained eigenvalues below sigma.
    auto count = [&](double sigma) {
        Eigen::Index neg = T.factor(sigma, D, L);
        if (k == 0) return neg;
        const Eigen::MatrixXd X = Tridiagonal::solve(D, L, C.transpose());
        const Eigen::MatrixXd S = C * X;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
        Eigen::Index pos = (es.eigenvalues().array() > 0).count();
        return neg + pos - k;
    };

    // Feasible trial vector for an upper bound.
    Eigen::VectorXd v = Eigen::VectorXd::Ones(T.size());
    if (k > 0) v -= C.transpose() * (C * C.transpose()).ldlt().solve(C * v);
    double hi = v.dot(T.mul_a(v)) / v.dot(T.mul_b(v));
    hi += 1e-12 * std::abs(hi) + 1e-300;
    double gap = std::max(1.0, std::abs(hi));
    double lo = hi - gap;
    int guard = 0;
    while (count(lo) > 0) {
        gap *= 2;
        lo = hi - gap;
        if (++guard > 200) throw NoConvergence("no lower bound for the spectrum");
    }
    int iters = 0;
    while (hi - lo > 1e-14 * std::max({std::abs(lo), std::abs(hi), 1e-300}) && iters < 200) {
        const double mid = 0.5 * (lo + hi);
        if (count(mid) > 0) hi = mid;
        else lo = mid;
        ++iters;
    }

    // Inverse iteration at sigma = lo (just below lambda_min).
    T.factor(lo, D, L);
    Eigen::MatrixXd X, S;
    Eigen::LDLT<Eigen::MatrixXd> Sldlt;
    if (k > 0) {
        X = Tridiagonal::solve(D, L, C.transpose());
        S = C * X;
        Sldlt.compute(0.5 * (S + S.transpose()));
    }
    Eigen::VectorXd x = v / std::sqrt(v.dot(T.mul_b(v)));
    double lambda = hi;
    int it = 0;
    for (; it < max_iter; ++it) {
        Eigen::VectorXd y = Tridiagonal::solve(D, L, T.mul_b(x));
        if (k > 0) y -= X * Sldlt.solve(C * y);
        y /= std::sqrt(y.dot(T.mul_b(y)));
        if (y.dot(T.mul_b(x)) < 0) y = -y;
        const Eigen::VectorXd d = y - x;
        x = y;
        lambda = x.dot(T.mul_a(x));
        if (std::sqrt(std::abs(d.dot(T.mul_b(d)))) <= 1e-10) break;
    }
    if (it == max_iter)
        throw NoConvergence("inverse iteration did not settle in " + std::to_string(max_iter) +
                            " steps (shift " + std::to_string(lo) + ")");

    SpectralResult out;
    out.lambda_min = lambda;
    Eigen::VectorXd r = T.mul_a(x) - lambda * T.mul_b(x);
    if (k > 0) r -= C.transpose() * (C * C.transpose()).ldlt().solve(C * r);
    out.residual = r.norm() / ((inf_norm(opd.stiffness) + std::abs(lambda) * inf_norm(opd.mass)) * x.norm());
    normalize_sign(x);
    out.eigvec = x;
    out.zero_band = band;
    out.classification = classify(lambda, band);
    out.dense = false;
    out.iterations = iters + it;
    return out;
}

}  // namespace

SpectralResult min_rayleigh(const DiscreteOperator& opd, const EigenOptions& opts) {
    const double band = opts.band * inf_norm(opd.stiffness) / inf_norm(opd.mass);
    if (opd.stiffness.rows() <= opts.dense_limit) return dense_min(opd, band);
    return sparse_min(opd, band, opts.max_iter);
}

ModalBasis modal_basis(const DiscreteOperator& opd, double band) {
    const Projector P(opd.constraints);
    const Reduced red = reduce(opd, P);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(red.A, red.B);
    if (es.info() != Eigen::Success) throw NoConvergence("dense generalized eigensolver failed");
    ModalBasis mb;
    mb.eigenvalues = es.eigenvalues();
    mb.vectors = P.lift(red.scale.asDiagonal() * es.eigenvectors());
    mb.null_basis = P.lift(Eigen::MatrixXd::Identity(P.n - P.k, P.n - P.k));
    mb.zero_band = band * inf_norm(opd.stiffness) / inf_norm(opd.mass);
    return mb;
}

Trajectory evolve_mode(const DiscreteOperator& opd, const Eigen::VectorXd& chi0,
                       const Eigen::VectorXd& chidot0, const Eigen::VectorXd& times) {
    return evolve_mode(opd, modal_basis(opd), chi0, chidot0, times);
}

Trajectory evolve_mode(const DiscreteOperator& opd, const ModalBasis& mb, const Eigen::VectorXd& chi0,
                       const Eigen::VectorXd& chidot0, const Eigen::VectorXd& times) {
    const Eigen::Index n = opd.stiffness.rows();
    if (chi0.size() != n || chidot0.size() != n)
        throw std::invalid_argument("evolve_mode: initial data has the wrong length");
    if (opd.constraints.rows() > 0) {
        const double tol = 1e-10;
        const double r0 = (opd.constraints * chi0).norm(), r1 = (opd.constraints * chidot0).norm();
        if (r0 > tol * std::max(chi0.norm(), 1.0) || r1 > tol * std::max(chidot0.norm(), 1.0))
            throw ConstraintViolated("initial data violates the constraint rows");
    }
    const Eigen::VectorXd a = mb.vectors.transpose() * (opd.mass * chi0);
    const Eigen::VectorXd b = mb.vectors.transpose() * (opd.mass * chidot0);
    const Eigen::Index m = mb.eigenvalues.size();
    Trajectory tr;
    tr.times = times;
    tr.energy.resize(times.size());
    tr.norm.resize(times.size());
    for (Eigen::Index s = 0; s < times.size(); ++s) {
        const double t = times(s);
        Eigen::VectorXd q(m), qd(m);
        for (Eigen::Index k = 0; k < m; ++k) {
            const double lam = mb.eigenvalues(k);
            double c, sn, dc, dsn;
            if (std::abs(lam) <= mb.zero_band) {
                c = 1, sn = t, dc = 0, dsn = 1;
            } else if (lam > 0) {
                const double w = std::sqrt(lam);
                c = std::cos(w * t), sn = std::sin(w * t) / w, dc = -w * std::sin(w * t), dsn = std::cos(w * t);
            } else {
                const double w = std::sqrt(-lam);
                c = std::cosh(w * t), sn = std::sinh(w * t) / w, dc = w * std::sinh(w * t), dsn = std::cosh(w * t);
            }
            q(k) = c * a(k) + sn * b(k);
            qd(k) = dc * a(k) + dsn * b(k);
        }
        const Eigen::VectorXd x = mb.vectors * q, xd = mb.vectors * qd;
        tr.energy(s) = xd.dot(opd.mass * xd) + x.dot(opd.stiffness * x);
        tr.norm(s) = std::sqrt(std::max(0.0, x.dot(opd.mass * x)));
        tr.states.push_back(x);
    }
    return tr;
}

double round_significant(double x, int digits) {
    if (x == 0 || !std::isfinite(x)) return x;
    const double e = std::floor(std::log10(std::abs(x)));
    const double f = std::pow(10.0, digits - 1 - e);
    return std::round(x * f) / f;
}

ScanRecord scan_point(double gamma, double rho_c, const std::vector<int>& l_set, const ScanOptions& opts) {
    ScanRecord rec;
    rec.gamma = gamma;
    rec.rho_c = rho_c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const StarProfile p = solve_profile({gamma, rho_c}, opts.profile);
        rec.R = p.R;
        for (int l : l_set) {
            const DiscreteOperator op =
                l == 0 ? assemble_radial(p, opts.n, opts.assembly) : assemble_mode(p, l, opts.n, opts.assembly);
            const SpectralResult res = min_rayleigh(op, opts.eigen);
            rec.modes.push_back({l, res.lambda_min, res.classification, res.residual});
        }
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

namespace {

void run_pool(std::size_t count, int threads, const std::function<void(std::size_t)>& job) {
    const int nt = std::max(1, std::min<int>(threads, static_cast<int>(count)));
    if (nt == 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count;) job(i);
        });
    for (auto& th : pool) th.join();
}

const ModeResult* radial_mode(const ScanRecord& r) {
    if (!r.error.empty()) return nullptr;
    for (const auto& m : r.modes)
        if (m.l == 0) return &m;
    return nullptr;
}

}  // namespace

ScanResult stability_scan(const std::vector<double>& gammas, const std::vector<double>& rho_cs,
                          const std::vector<int>& l_set_in, const ScanOptions& opts) {
    if (gammas.empty() || rho_cs.empty()) throw std::invalid_argument("stability_scan: empty grid");
    std::vector<int> l_set = l_set_in;
    if (std::find(l_set.begin(), l_set.end(), 0) == l_set.end()) l_set.insert(l_set.begin(), 0);

    ScanResult out;
    const std::size_t nr = rho_cs.size();
    out.records.resize(gammas.size() * nr);
    run_pool(out.records.size(), opts.threads, [&](std::size_t i) {
        out.records[i] = scan_point(gammas[i / nr], rho_cs[i % nr], l_set, opts);
    });
    if (!opts.bracket) return out;

    for (std::size_t g = 0; g < gammas.size(); ++g)
        for (std::size_t j = 0; j + 1 < nr; ++j) {
            const ModeResult* a = radial_mode(out.records[g * nr + j]);
            const ModeResult* b = radial_mode(out.records[g * nr + j + 1]);
            if (!a || !b) continue;
            if ((a->sign == Sign::Negative) == (b->sign == Sign::Negative)) continue;
            SignChange sc;
            sc.gamma = gammas[g];
            sc.rho_lo = rho_cs[j];
            sc.rho_hi = rho_cs[j + 1];
            sc.from = a->sign;
            sc.to = b->sign;
            out.transitions.push_back(sc);
        }
    run_pool(out.transitions.size(), opts.threads, [&](std::size_t i) {
        SignChange& sc = out.transitions[i];
        const bool lo_negative = sc.from == Sign::Negative;
        double lo = sc.rho_lo, hi = sc.rho_hi;
        for (int it = 0; it < 60; ++it) {
            if (round_significant(lo, 3) == round_significant(hi, 3) || hi / lo - 1 < 1e-6) break;
            const double mid = std::sqrt(lo * hi);
            const ScanRecord r = scan_point(sc.gamma, mid, {0}, opts);
            const ModeResult* m = radial_mode(r);
            if (!m) break;
            if ((m->sign == Sign::Negative) == lo_negative) lo = mid;
            else hi = mid;
        }
        sc.rho_lo = lo;
        sc.rho_hi = hi;
        sc.rho_estimate = round_significant(std::sqrt(lo * hi), 3);
    });
    return out;
}

}  // namespace liquidstar
