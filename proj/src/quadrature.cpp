#include "liquidstar/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace liquidstar {

namespace {

// Legendre P_n(x) and its derivative.
void legendre(int n, double x, double& p, double& dp) {
    double p0 = 1, p1 = x;
    for (int k = 2; k <= n; ++k) {
        double pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = pk;
    }
    p = n == 0 ? 1 : p1;
    dp = n * (x * p1 - p0) / (x * x - 1);
}

}  // namespace

GaussRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    GaussRule g{Eigen::VectorXd(n), Eigen::VectorXd(n)};
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5)), p, dp;
        for (int it = 0; it < 100; ++it) {
            legendre(n, x, p, dp);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        legendre(n, x, p, dp);
        g.x(i) = -x;
        g.x(n - 1 - i) = x;
        g.w(i) = g.w(n - 1 - i) = 2 / ((1 - x * x) * dp * dp);
    }
    return g;
}

double simpson(const Eigen::Ref<const Eigen::VectorXd>& f, double h) {
    const Eigen::Index n = f.size() - 1;
    if (n < 1) return 0;
    if (n == 1) return 0.5 * h * (f(0) + f(1));
    double s = 0;
    Eigen::Index end = (n % 2 == 0) ? n : n - 3;
    for (Eigen::Index i = 0; i + 2 <= end; i += 2) s += f(i) + 4 * f(i + 1) + f(i + 2);
    s *= h / 3;
    if (n % 2 == 1)
        s += 3 * h / 8 * (f(n - 3) + 3 * f(n - 2) + 3 * f(n - 1) + f(n));
    return s;
}

Eigen::VectorXd derivative_uniform(const Eigen::Ref<const Eigen::VectorXd>& f, double h) {
    const Eigen::Index n = f.size();
    if (n < 5) throw std::invalid_argument("derivative_uniform: need at least 5 samples");
    Eigen::VectorXd d(n);
    const double c = 1 / (12 * h);
    d(0) = c * (-25 * f(0) + 48 * f(1) - 36 * f(2) + 16 * f(3) - 3 * f(4));
    d(1) = c * (-3 * f(0) - 10 * f(1) + 18 * f(2) - 6 * f(3) + f(4));
    for (Eigen::Index i = 2; i < n - 2; ++i)
        d(i) = c * (f(i - 2) - 8 * f(i - 1) + 8 * f(i + 1) - f(i + 2));
    const Eigen::Index m = n - 1;
    d(m - 1) = -c * (-3 * f(m) - 10 * f(m - 1) + 18 * f(m - 2) - 6 * f(m - 3) + f(m - 4));
    d(m) = -c * (-25 * f(m) + 48 * f(m - 1) - 36 * f(m - 2) + 16 * f(m - 3) - 3 * f(m - 4));
    return d;
}

int cubic_stencil(int cell, int n_cells) {
    if (n_cells < 3) throw std::invalid_argument("cubic_stencil: need at least 3 cells");
    int first = cell - 1;
    if (first < 0) first = 0;
    if (first > n_cells - 3) first = n_cells - 3;
    return first;
}

Eigen::Vector4d lagrange4(double s) {
    const double a = s, b = s - 1, c = s - 2, d = s - 3;
    return {-b * c * d / 6, a * c * d / 2, -a * b * d / 2, a * b * c / 6};
}

Eigen::VectorXd pchip_slopes(const Eigen::Ref<const Eigen::VectorXd>& y, double h) {
    const Eigen::Index n = y.size();
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
    if (n < 2) return d;
    Eigen::VectorXd del = (y.tail(n - 1) - y.head(n - 1)) / h;
    if (n == 2) {
        d.setConstant(del(0));
        return d;
    }
    for (Eigen::Index k = 1; k < n - 1; ++k) {
        const double a = del(k - 1), b = del(k);
        if (a * b > 0) d(k) = 2 / (1 / a + 1 / b);
    }
    auto end_slope = [](double d0, double d1) {
        double s = 0.5 * (3 * d0 - d1);
        if (s * d0 <= 0) return 0.0;
        if (d0 * d1 < 0 && std::abs(s) > 3 * std::abs(d0)) return 3 * d0;
        return s;
    };
    d(0) = end_slope(del(0), del(1));
    d(n - 1) = end_slope(del(n - 2), del(n - 3));
    return d;
}

}  // namespace liquidstar
