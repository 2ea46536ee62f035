#pragma once

#include <Eigen/Dense>

namespace liquidstar {

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    Eigen::VectorXd x, w;
};
GaussRule gauss_legendre(int n);

// Composite Simpson on a uniform grid (3/8 rule closes an odd interval count).
double simpson(const Eigen::Ref<const Eigen::VectorXd>& f, double h);

// Fourth-order finite-difference derivative on a uniform grid.
Eigen::VectorXd derivative_uniform(const Eigen::Ref<const Eigen::VectorXd>& f, double h);

// Four-node Lagrange stencil for cell [x_i, x_{i+1}] on a grid with n_cells cells:
// returns the first node index; nodes are first..first+3.
int cubic_stencil(int cell, int n_cells);
// Lagrange basis on nodes 0,1,2,3 evaluated at s (in node units).
Eigen::Vector4d lagrange4(double s);

// Fritsch-Carlson monotone cubic slopes for samples y on a uniform grid of step h.
Eigen::VectorXd pchip_slopes(const Eigen::Ref<const Eigen::VectorXd>& y, double h);

// Evaluate a cubic Hermite segment; t in [0,1].
inline double hermite(double y0, double y1, double d0, double d1, double h, double t) {
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 +
           (t3 - t2) * h * d1;
}

}  // namespace liquidstar
