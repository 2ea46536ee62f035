#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "liquidstar/profile.hpp"

namespace liquidstar {

// How the Robin (l = 0) and Neumann (l >= 1) conditions enter the discrete problem.
// Natural: left to the variational form (the infimum over the constrained space equals
// the unconstrained one and isolated eigenvalues converge at O(h^2)).
// Imposed: an explicit constraint row with a one-sided derivative stencil (O(h)).
enum class BoundaryRows { Natural, Imposed };

struct AssemblyOptions {
    BoundaryRows boundary = BoundaryRows::Natural;
    bool orthogonality = true;  // l = 1: int rho chi r^2 dr = 0
};

// P1 finite elements on a uniform grid of n cells over [0, R]. For l >= 1 both forms
// are divided by R^(2l); `form_scale` multiplies them back.
struct DiscreteOperator {
    int l = 0;
    bool radial = true;
    Eigen::SparseMatrix<double> stiffness, mass;
    Eigen::MatrixXd constraints;  // one functional per row
    std::vector<std::string> constraint_names;
    double gamma = 0, rho_c = 0, R = 0;
    int n = 0;
    double form_scale = 1;
    Eigen::VectorXd nodes;
};

DiscreteOperator assemble_radial(const StarProfile& p, int n, const AssemblyOptions& opts = {});
DiscreteOperator assemble_mode(const StarProfile& p, int l, int n, const AssemblyOptions& opts = {});
// Pencil from arbitrary matrices (testing and reuse).
DiscreteOperator make_operator(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                               const Eigen::MatrixXd& C = Eigen::MatrixXd(0, 0));

enum class Sign { Positive, Zero, Negative };
std::string sign_name(Sign s);

struct SpectralResult {
    double lambda_min = 0;
    Eigen::VectorXd eigvec;  // B-normalized, largest entry positive
    double residual = 0;     // |Z^T (A - lambda B) v| / ((|A| + |lambda| |B|) |v|)
    Sign classification = Sign::Positive;
    double zero_band = 0;    // 1e-8 |A| / |B|
    bool dense = true;
    int iterations = 0;
};

struct EigenOptions {
    int dense_limit = 2049;  // unknowns; above this, Sturm bisection + inverse iteration
    int max_iter = 200;
    double band = 1e-8;
};

SpectralResult min_rayleigh(const DiscreteOperator& opd, const EigenOptions& opts = {});

// All eigenpairs of the constrained pencil, B-orthonormal, in the full space.
struct ModalBasis {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd vectors;
    Eigen::MatrixXd null_basis;  // orthonormal basis of the constraint kernel
    double zero_band = 0;
};
ModalBasis modal_basis(const DiscreteOperator& opd, double band = 1e-8);

struct Trajectory {
    Eigen::VectorXd times, energy, norm;  // energy = |chi'|_B^2 + chi^T A chi; norm = |chi|_B
    std::vector<Eigen::VectorXd> states;
};
Trajectory evolve_mode(const DiscreteOperator& opd, const Eigen::VectorXd& chi0,
                       const Eigen::VectorXd& chidot0, const Eigen::VectorXd& times);
Trajectory evolve_mode(const DiscreteOperator& opd, const ModalBasis& basis,
                       const Eigen::VectorXd& chi0, const Eigen::VectorXd& chidot0,
                       const Eigen::VectorXd& times);

struct ScanOptions {
    int n = 512;
    int threads = 1;
    SolverOptions profile;
    AssemblyOptions assembly;
    EigenOptions eigen;
    bool bracket = true;
};

struct ModeResult {
    int l = 0;
    double lambda_min = 0;
    Sign sign = Sign::Positive;
    double residual = 0;
};

struct ScanRecord {
    double gamma = 0, rho_c = 0, R = 0;
    std::vector<ModeResult> modes;
    double wall_time = 0;
    std::string error;  // nonempty if the point failed
};

// Sign change of lambda_min(l = 0) between consecutive rho_c values of one gamma row.
struct SignChange {
    double gamma = 0;
    double rho_lo = 0, rho_hi = 0;  // bracket after bisection
    double rho_estimate = 0;        // three significant figures
    Sign from = Sign::Positive, to = Sign::Negative;
};

struct ScanResult {
    std::vector<ScanRecord> records;  // gamma-major, input order
    std::vector<SignChange> transitions;
};

// One (gamma, rho_c) point: profile, radial and nonradial minima.
ScanRecord scan_point(double gamma, double rho_c, const std::vector<int>& l_set,
                      const ScanOptions& opts);
ScanResult stability_scan(const std::vector<double>& gammas, const std::vector<double>& rho_cs,
                          const std::vector<int>& l_set, const ScanOptions& opts = {});

double round_significant(double x, int digits);

}  // namespace liquidstar
