#include "sysid/estimator.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sysid/linalg.hpp"

namespace sysid {

namespace {

// Pseudo-inverse of a symmetric PSD matrix with a relative rank cut.
// Returns the pinv, the rank, and the threshold used.
struct SymPinv {
    Eigen::MatrixXd pinv;
    int rank = 0;
    double threshold = 0.0;
};

SymPinv sym_pinv(const Eigen::MatrixXd& w) {
    Eigen::MatrixXd s = 0.5 * (w + w.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    const int d = static_cast<int>(s.rows());
    const double lam_max = es.eigenvalues().cwiseAbs().maxCoeff();
    SymPinv out;
    out.threshold = d * std::numeric_limits<double>::epsilon() * lam_max;
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < d; ++i) {
        if (es.eigenvalues()(i) > out.threshold) {
            inv(i) = 1.0 / es.eigenvalues()(i);
            ++out.rank;
        }
    }
    out.pinv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
    return out;
}

}  // namespace

OlsEstimate ols(const Trajectory& traj, const Eigen::MatrixXd* true_a) {
    if (traj.horizon < 1) throw std::invalid_argument("ols: trajectory has no transitions");
    const Eigen::MatrixXd x = traj.covariates();
    const Eigen::MatrixXd y = traj.targets();

    OlsEstimate est;
    est.gram = x.transpose() * x;
    est.gram = 0.5 * (est.gram + est.gram.transpose().eval());

    const SymPinv p = sym_pinv(est.gram);
    est.gram_rank = p.rank;
    est.pinv_threshold_used = p.threshold;
    est.degenerate = p.rank < x.cols();
    // A_hat = (sum x_{s+1} x_s^T) (sum x_s x_s^T)^dagger = Y^T X (X^T X)^dagger.
    est.a_hat = y.transpose() * x * p.pinv;
    if (true_a) est.error_opnorm = estimation_error(est.a_hat, *true_a);
    return est;
}

double error_identity_check(const Trajectory& traj, const Eigen::MatrixXd& a) {
    if (traj.noise_record.rows() != traj.horizon)
        throw std::invalid_argument("error_identity_check: trajectory carries no noise record");
    if (a.rows() != traj.dim() || a.cols() != traj.dim())
        throw std::invalid_argument("error_identity_check: shape mismatch");

    const OlsEstimate est = ols(traj);
    const Eigen::MatrixXd x = traj.covariates();
    const Eigen::MatrixXd e = traj.noise_matrix();
    const SymPinv p = sym_pinv(x.transpose() * x);
    const Eigen::MatrixXd rhs = e.transpose() * x * p.pinv;
    return operator_norm(Eigen::MatrixXd((est.a_hat - a) - rhs));
}

double estimation_error(const Eigen::MatrixXd& a_hat, const Eigen::MatrixXd& a) {
    if (a_hat.rows() != a.rows() || a_hat.cols() != a.cols())
        throw std::invalid_argument("estimation_error: shape mismatch");
    return operator_norm(Eigen::MatrixXd(a_hat - a));
}

SelfNormStat self_normalized_stat(const Trajectory& traj, const Eigen::MatrixXd& s,
                                  double delta, double k_psi2, double c) {
    const int d = traj.dim();
    if (s.rows() != d || s.cols() != d)
        throw std::invalid_argument("self_normalized_stat: S has wrong shape");
    Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("self_normalized_stat: S must be positive definite");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("self_normalized_stat: delta must lie in (0,1)");

    const Eigen::MatrixXd x = traj.covariates();
    const Eigen::MatrixXd e = traj.noise_matrix();
    const Eigen::MatrixXd v = x.transpose() * x + sym;

    SelfNormStat out;
    out.regularizer = sym;
    out.value = operator_norm(Eigen::MatrixXd(e.transpose() * x * sym_inv_sqrt(v)));

    // log(5^d det((X^T X + S) S^{-1})^{1/2} / delta), evaluated through
    // log-determinants to dodge overflow for large horizons.
    const double logdet_v = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(v)
                                .eigenvalues()
                                .array()
                                .log()
                                .sum();
    const double logdet_s = es.eigenvalues().array().log().sum();
    const double log_term =
        d * std::log(5.0) + 0.5 * (logdet_v - logdet_s) + std::log(1.0 / delta);
    out.bound = std::sqrt(16.0 * c * k_psi2 * k_psi2 * log_term);
    return out;
}

}  // namespace sysid
