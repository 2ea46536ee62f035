#pragma once

#include <Eigen/Dense>

namespace liquidstar {

struct PolytropeParams {
    double gamma = 2;
    double rho_c = 2;
};

struct SolverOptions {
    double tol = 1e-12;        // relative step tolerance and surface bisection tolerance
    double max_radius = 0;     // 0: 1000 central length scales
    int grid_n = 2048;         // cells of the uniform output grid
    double fixed_step = 0;     // > 0: fixed-step Dormand-Prince (convergence studies only)
    int max_steps = 1000000;
};

// Equilibrium density on a uniform grid r_i = i R / n, i = 0..n.
struct StarProfile {
    PolytropeParams params;
    double R = 0;
    double tol = 0;
    Eigen::VectorXd r, rho, drho, dpgamma;
    Eigen::VectorXd mass;            // int_0^r y^2 rho dy
    Eigen::VectorXd dpgamma_over_r;  // -(rho^gamma)'/r, with its limit at r = 0
    Eigen::VectorXd step_r, step_rho;  // accepted adaptive steps of the surface search

    int cells() const { return static_cast<int>(r.size()) - 1; }
    double h() const { return R / cells(); }
};

// Length scale of the central Taylor expansion.
double central_length(const PolytropeParams& p);

StarProfile solve_profile(const PolytropeParams& params, const SolverOptions& opts = {});

// Rebuilds derived arrays (mass, dpgamma_over_r) from r, rho, drho, dpgamma.
void finish_profile(StarProfile& p);

struct ProfileSample {
    double rho, drho, dpgamma;
};
ProfileSample eval_profile(const StarProfile& p, double r);
// -(rho^gamma)'/r, interpolated.
double eval_dpgamma_over_r(const StarProfile& p, double r);

struct BoundReport {
    double lower_margin;  // min over interior nodes of -(rho^gamma)'/r - 4pi/3
    double upper_margin;  // min over interior nodes of (4pi/3) rho_c^2 + (rho^gamma)'/r
    Eigen::VectorXd lower, upper;  // per node, index 0 holds the r -> 0 limit
    bool holds() const { return lower_margin > 0 && upper_margin > 0; }
};
BoundReport derivative_bound_report(const StarProfile& p);

}  // namespace liquidstar
