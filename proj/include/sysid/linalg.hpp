#pragma once

#include <Eigen/Dense>

namespace sysid {

// Operator norm (largest singular value) of a general real matrix.
double operator_norm(const Eigen::MatrixXd& w);

// Operator norm of a complex matrix.
double operator_norm(const Eigen::MatrixXcd& w);

// Largest absolute eigenvalue of a symmetric matrix. The input is
// symmetrized first; cheaper and exact for the symmetric differences we
// measure ((XM)^T XM - I and friends).
double sym_opnorm(const Eigen::MatrixXd& w);

// Inverse symmetric square root of a symmetric PD matrix, by
// eigendecomposition. Eigenvalues are floored at eig_floor before the
// root inversion to guard round-off on nearly singular inputs.
Eigen::MatrixXd sym_inv_sqrt(const Eigen::MatrixXd& w, double eig_floor = 1e-12);

// Singular values of a rectangular matrix, descending.
Eigen::VectorXd singular_values(const Eigen::MatrixXd& w);

bool is_finite(const Eigen::MatrixXd& w);

}  // namespace sysid
