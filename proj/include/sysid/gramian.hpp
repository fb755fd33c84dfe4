#pragma once

#include <Eigen/Dense>
#include <optional>

namespace sysid {

// Default cap on t*d for any computation that assembles the block
// Toeplitz covariance factor explicitly.
inline constexpr int kToeplitzCap = 2000;

// Everything bound-side that depends only on (A, t): the Gramian sum
// sum_{s<t} Gamma_s(A), its smallest eigenvalue, and the whitener
// M = (sum)^{-1/2}.
struct GramianSummary {
    int t = 0;
    Eigen::MatrixXd gramian_sum;
    double lambda_min = 0.0;
    Eigen::MatrixXd whitener;      // M, symmetric PD
    double whitener_norm = 0.0;    // ||M|| = 1/sqrt(lambda_min)
};

// The three routes to (a bound on) ||Gamma||, cheapest-to-tightest order
// reversed: explicit norm <= symbol-grid bound <= J(A).
struct ToeplitzInfo {
    int t = 0;
    std::optional<double> explicit_norm;  // absent when t*d over cap
    double symbol_bound = 0.0;
    double symbol_refinement_residual = 0.0;  // sup(2g) - sup(g) from the grid doubling
    double series_bound = 0.0;                // J(A)
};

struct BoundReport {
    double epsilon = 0.0;
    double delta = 0.0;
    double c = 0.0;             // constant actually used in the formulas
    bool c_includes_k4 = false; // true when caller passed c' and c = c'*K^4
    double j_a = 0.0;           // J(A)
    double required_lambda_min = 0.0;  // RHS of the sufficient condition
    int minimal_t = 0;                 // first t with lambda_min(G_t) >= required
    double lambda_min_at_minimal_t = 0.0;
    double rate_bound = 0.0;           // error-rate RHS evaluated at minimal_t
    double lower_bound_lambda_min = 0.0;  // necessary-condition threshold
};

// Gamma_s(A) = sum_{k=0}^s A^k (A^k)^T, by iterated accumulation.
Eigen::MatrixXd finite_gramian(const Eigen::MatrixXd& a, int s);

// sum_{s=0}^{t-1} Gamma_s(A) with lambda_min, whitener and its norm.
// Throws std::logic_error if the sum fails to be PD (cannot happen for
// valid input; it would signal a bug).
GramianSummary gramian_sum(const Eigen::MatrixXd& a, int t);

// J(A) = sum_{s>=0} ||A^s||: exact partial sum plus a certified geometric
// tail below tol. Blocks of length S0 (first power with norm <= 1/2)
// dominate the tail even though ||A^s|| need not be monotone.
double series_bound(const Eigen::MatrixXd& a, double tol = 1e-9);

// Largest singular value of the assembled t*d x t*d lower block Toeplitz
// matrix with blocks I, A, ..., A^{t-1}. Throws CapacityError when
// t*d > cap.
double toeplitz_norm_explicit(const Eigen::MatrixXd& a, int t, int cap = kToeplitzCap);

// Assembled Toeplitz factor (shared with the chaos-statistic dual path).
Eigen::MatrixXd assemble_toeplitz(const Eigen::MatrixXd& a, int t, int cap = kToeplitzCap);

// sup over x in [0,1) of ||sum_{s<t} A^s e^{2 pi i s x}|| on a uniform
// grid, refined once by doubling.
double toeplitz_norm_symbol(const Eigen::MatrixXd& a, int t, int grid_points = 4096);

// All three Toeplitz quantities in one report.
ToeplitzInfo toeplitz_info(const Eigen::MatrixXd& a, int t, int grid_points = 4096,
                           int cap = kToeplitzCap);

// Evaluate the sufficient condition and locate its threshold horizon by
// doubling-then-bisection on lambda_min(G_t) (nondecreasing in t).
// use_k4_scaling: treat c as c' and multiply by K^4.
// Throws CapacityError (message carries lambda_min at t_max) when the
// condition is not met by t_max.
BoundReport evaluate_conditions(const Eigen::MatrixXd& a, double epsilon, double delta,
                                double c, double k_psi2, int t_max,
                                bool use_k4_scaling = false);

}  // namespace sysid
