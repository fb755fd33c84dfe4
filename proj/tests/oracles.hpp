#pragma once

// Test-only oracles, independent of the library's computation paths:
// QR least squares against the Gram pseudo-inverse, incomplete-gamma
// chi-square tails against Monte Carlo, power-series psi2 against
// Simpson quadrature, explicit eigen-solves against net bounds.

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <stdexcept>

namespace oracles {

inline Eigen::MatrixXd random_matrix(std::mt19937_64& gen, int rows, int cols,
                                     double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = scale * normal(gen);
    return m;
}

// Random stable dynamics: gaussian entries rescaled to a target spectral
// radius drawn from [rho_lo, rho_hi].
inline Eigen::MatrixXd random_stable(std::mt19937_64& gen, int d, double rho_lo = 0.1,
                                     double rho_hi = 0.95) {
    std::uniform_real_distribution<double> unif(rho_lo, rho_hi);
    while (true) {
        Eigen::MatrixXd a = random_matrix(gen, d, d);
        const double rho = Eigen::EigenSolver<Eigen::MatrixXd>(a, false)
                               .eigenvalues()
                               .cwiseAbs()
                               .maxCoeff();
        if (rho < 1e-12) continue;  // essentially nilpotent draw; retry
        a *= unif(gen) / rho;
        return a;
    }
}

// Least-squares solve of min sum ||x_{s+1} - A x_s||^2 by column-pivoted
// QR on the covariates matrix; no Gram matrix, no eigendecomposition.
inline Eigen::MatrixXd qr_least_squares(const Eigen::MatrixXd& x,
                                        const Eigen::MatrixXd& y) {
    return x.colPivHouseholderQr().solve(y).transpose();
}

// Regularized lower incomplete gamma P(a, x); series for x < a+1,
// continued fraction otherwise.
inline double gammp(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gammp: bad arguments");
    if (x == 0.0) return 0.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int n = 0; n < 10000; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15)
                return sum * std::exp(-x + a * std::log(x) - gln);
        }
        throw std::runtime_error("gammp: series failed to converge");
    }
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15)
            return 1.0 - std::exp(-x + a * std::log(x) - gln) * h;
    }
    throw std::runtime_error("gammp: continued fraction failed to converge");
}

inline double chi2_cdf(double dof, double x) { return gammp(dof / 2.0, x / 2.0); }

// P(|chi2_dof - dof| > eps * dof).
inline double chi2_two_sided_tail(double dof, double eps) {
    const double lo = dof * (1.0 - eps);
    const double hi = dof * (1.0 + eps);
    double p = 1.0 - chi2_cdf(dof, hi);
    if (lo > 0.0) p += chi2_cdf(dof, lo);
    return p;
}

// E[exp(X^2/K^2)] for X ~ U[-sqrt(3), sqrt(3)] through the exact power
// series sum_n alpha^n / (n! (2n+1)) with alpha = 3/K^2; solved for K by
// bisection. Independent of the Simpson quadrature in the library.
inline double uniform_psi2_series() {
    auto mgf = [](double alpha) {
        double term = 1.0, sum = 1.0;
        for (int n = 1; n < 200; ++n) {
            term *= alpha / n;
            const double contrib = term / (2 * n + 1);
            sum += contrib;
            if (contrib < 1e-18 * sum) break;
        }
        return sum;
    };
    double lo = 0.1, hi = 3.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mgf(mid) < 2.0) lo = mid; else hi = mid;
    }
    const double alpha = 0.5 * (lo + hi);
    return std::sqrt(3.0 / alpha);
}

}  // namespace oracles
