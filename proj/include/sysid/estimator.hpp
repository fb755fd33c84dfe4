#pragma once

#include <Eigen/Dense>
#include <optional>

#include "sysid/lti.hpp"

namespace sysid {

struct OlsEstimate {
    Eigen::MatrixXd a_hat;
    Eigen::MatrixXd gram;          // X^T X (symmetrized)
    int gram_rank = 0;
    double pinv_threshold_used = 0.0;
    bool degenerate = false;       // gram_rank < d
    std::optional<double> error_opnorm;  // filled when the true A is supplied
};

struct SelfNormStat {
    Eigen::MatrixXd regularizer;  // S
    double value = 0.0;           // ||E^T X (X^T X + S)^{-1/2}||
    double bound = 0.0;           // sqrt of the self-normalized tail RHS
};

// OLS estimate from one trajectory. x_0 = 0, so the sums effectively run
// over s = 1..t. Pseudo-inverse of the Gram matrix with a relative
// eigenvalue cut at d * machine_eps * lambda_max; a zero Gram yields
// A_hat = 0 with the degenerate flag set.
OlsEstimate ols(const Trajectory& traj,
                const Eigen::MatrixXd* true_a = nullptr);

// || (A_hat - A) - E^T X (X^T X)^dagger ||; the two sides agree path-wise
// whenever A is the true dynamics of the trajectory.
double error_identity_check(const Trajectory& traj, const Eigen::MatrixXd& a);

// Operator norm of A_hat - A.
double estimation_error(const Eigen::MatrixXd& a_hat, const Eigen::MatrixXd& a);

// Self-normalized statistic ||E^T X (X^T X + S)^{-1/2}|| and the
// corresponding tail bound sqrt(16 c K^2 log(5^d det((X^T X + S) S^{-1})^{1/2} / delta)).
SelfNormStat self_normalized_stat(const Trajectory& traj, const Eigen::MatrixXd& s,
                                  double delta, double k_psi2, double c);

}  // namespace sysid
