#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "liquidstar/harmonics.hpp"
#include "liquidstar/profile.hpp"

namespace liquidstar {

enum class BoundaryCondition { None, NeumannAtR, RadialRobin };

// chi_lm (l >= 1) or the radial variable chi (l = 0) with its derivative on the
// profile grid.
struct ChiField {
    int l = 1;
    Eigen::VectorXd r, values, derivs;
    BoundaryCondition bc = BoundaryCondition::None;
};

ChiField chi_from_samples(int l, const Eigen::VectorXd& r, const Eigen::VectorXd& values,
                          BoundaryCondition bc);
// chi = sum_k c_k (r/R)^k on the profile grid.
ChiField chi_from_polynomial(int l, const StarProfile& p, const Eigen::VectorXd& coeffs,
                             BoundaryCondition bc);

// Scale-free residual of the claimed boundary condition.
double bc_residual(const ChiField& chi);
// Throws BcMismatch unless chi claims `bc` and satisfies it to `tol`.
void require_bc(const ChiField& chi, BoundaryCondition bc, double tol = 1e-6);

// Seeded random polynomial fields of degree <= `degree` obeying chi'(R) = 0 or the
// Robin condition 3 chi(R) + R chi'(R) = 0.
ChiField random_neumann_chi(int l, const StarProfile& p, std::uint64_t seed, int degree = 8);
ChiField random_robin_chi(const StarProfile& p, std::uint64_t seed, int degree = 8);

// Fields claiming a condition must satisfy it and use the reduced boundary value
// g(R) = rho'(R) chi(R) R^(l-1) (l = 0: R rho'(R) chi(R)).
RadialModeFunction g_from_chi(const ChiField& chi, const StarProfile& p);
// Inverse maps: l >= 1 integrates (rho chi)' = g r^(1-l) inward from the boundary
// value; l = 0 uses chi = Psi'/(r rho).
ChiField chi_from_g(int l, const RadialModeFunction& g, const StarProfile& p);

enum class Route { Direct, ChiOne, ChiTwo, Radial };
std::string route_name(Route r);

struct ModeEnergy {
    int l = 0, m = 0;
    double lambda = 0;      // Direct: Lambda_lm. ChiOne: bulk integral. Others: total.
    double gamma_term = 0;  // Direct: Gamma_lm. ChiOne: boundary term. Others: 0.
    double total = 0;
    Route route = Route::Direct;
    double g_l2 = 0;          // int g^2 r^2 dr
    double g_boundary_sq = 0; // g(R)^2
};

ModeEnergy energy_direct(int l, int m, const RadialModeFunction& g, const StarProfile& p);
ModeEnergy energy_chi_one(const ChiField& chi, const StarProfile& p, int m = 0);
ModeEnergy energy_chi_two(const ChiField& chi, const StarProfile& p, int m = 0);
double radial_energy(const ChiField& chi, const StarProfile& p);
double energy_norm_E(const ChiField& chi, double R);

struct ModeInput {
    int l = 0, m = 0;
    std::variant<ChiField, RadialModeFunction> field;
};
struct EnergyTable {
    double total = 0;
    std::vector<ModeEnergy> modes;
    std::vector<double> route_delta;  // relative disagreement of the second route per mode
};
// chi inputs use the chi_two (l >= 1) or radial (l = 0) form and are cross-checked
// against the direct route; g inputs use the direct route.
EnergyTable total_energy(const std::vector<ModeInput>& fields, const StarProfile& p);

// Norms on the right of the per-mode upper and lower bounds:
//   upper: int g^2 r^2 - (R^2/rho'(R)) g(R)^2, lower: int g^2 r^2 + (R^2/rho'(R)^2) g(R)^2.
struct BoundRatios {
    double upper_norm, lower_norm, upper_ratio, lower_ratio;
};
BoundRatios bound_ratios(const ModeEnergy& e, const StarProfile& p);

// The l = 0 reconstruction applied to chi_00 = 1: C = int_0^R y rho' dy - R.
struct Obstruction {
    double c_value;       // C
    double rho_integral;  // int_0^R rho dr
};
Obstruction constant_chi_obstruction(const StarProfile& p);

}  // namespace liquidstar
