#include "sysid/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace sysid {

double operator_norm(const Eigen::MatrixXd& w) {
    if (w.size() == 0) return 0.0;
    if (w.rows() <= 16 && w.cols() <= 16) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(w);
        return svd.singularValues()(0);
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(w);
    return svd.singularValues()(0);
}

double operator_norm(const Eigen::MatrixXcd& w) {
    if (w.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(w);
    return svd.singularValues()(0);
}

double sym_opnorm(const Eigen::MatrixXd& w) {
    Eigen::MatrixXd s = 0.5 * (w + w.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::MatrixXd sym_inv_sqrt(const Eigen::MatrixXd& w, double eig_floor) {
    Eigen::MatrixXd s = 0.5 * (w + w.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    Eigen::VectorXd inv_root = es.eigenvalues()
                                   .cwiseMax(eig_floor)
                                   .cwiseSqrt()
                                   .cwiseInverse();
    return es.eigenvectors() * inv_root.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& w) {
    if (w.rows() <= 16 && w.cols() <= 16) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(w);
        return svd.singularValues();
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(w);
    return svd.singularValues();
}

bool is_finite(const Eigen::MatrixXd& w) {
    return w.allFinite();
}

}  // namespace sysid
