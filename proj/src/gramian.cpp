#include "sysid/gramian.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "sysid/errors.hpp"
#include "sysid/linalg.hpp"

namespace sysid {

Eigen::MatrixXd finite_gramian(const Eigen::MatrixXd& a, int s) {
    if (s < 0) throw std::invalid_argument("finite_gramian: s must be >= 0");
    const int d = static_cast<int>(a.rows());
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(d, d);
    for (int k = 1; k <= s; ++k) {
        power = a * power;
        acc += power * power.transpose();
    }
    return acc;
}

GramianSummary gramian_sum(const Eigen::MatrixXd& a, int t) {
    if (t < 1) throw std::invalid_argument("gramian_sum: t must be >= 1");
    const int d = static_cast<int>(a.rows());

    // sum_{s=0}^{t-1} Gamma_s = sum_{k=0}^{t-1} (t-k) A^k (A^k)^T.
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd sum = static_cast<double>(t) * Eigen::MatrixXd::Identity(d, d);
    for (int k = 1; k < t; ++k) {
        power = a * power;
        sum += static_cast<double>(t - k) * (power * power.transpose());
    }
    sum = 0.5 * (sum + sum.transpose().eval());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sum);
    const double lambda_min = es.eigenvalues().minCoeff();
    if (lambda_min <= 0.0)
        throw std::logic_error("gramian_sum: sum is not positive definite");

    GramianSummary out;
    out.t = t;
    out.gramian_sum = sum;
    out.lambda_min = lambda_min;
    Eigen::VectorXd inv_root =
        es.eigenvalues().cwiseMax(1e-12).cwiseSqrt().cwiseInverse();
    out.whitener = es.eigenvectors() * inv_root.asDiagonal() * es.eigenvectors().transpose();
    out.whitener_norm = 1.0 / std::sqrt(lambda_min);
    return out;
}

double series_bound(const Eigen::MatrixXd& a, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("series_bound: tol must be positive");
    const int d = static_cast<int>(a.rows());
    constexpr int kBlockCap = 4096;  // powers examined while hunting for ||A^S0|| <= 1/2

    // Head scan: accumulate ||A^s|| until the norm falls to 1/2.
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(d, d);
    double head = 0.0;
    int s0 = -1;
    double s0_norm = 0.0;
    for (int s = 0; s <= kBlockCap; ++s) {
        const double n = operator_norm(power);
        if (s > 0 && n <= 0.5) {
            s0 = s;
            s0_norm = n;
            break;
        }
        head += n;
        power = a * power;
    }
    if (s0 < 0)
        throw NonConvergenceError(
            "series_bound: no power with norm <= 1/2 within the iteration cap "
            "(rho(A) too close to 1)");

    // For s = q*S0 + r: ||A^s|| <= ||A^{S0}||^q * ||A^r||, so the terms
    // from block q onward are dominated by head * s0_norm^q / (1 - s0_norm).
    // Extend the exact sum block by block until that bound drops below tol.
    double exact = head;                       // covers block q = 0, s in [0, s0)
    Eigen::MatrixXd block_power = power;       // A^{(q+1) * s0}
    int q = 1;
    const int kMaxBlocks = 10000;
    while (q <= kMaxBlocks) {
        const double tail = head * std::pow(s0_norm, q) / (1.0 - s0_norm);
        if (tail <= tol) return exact + tail;
        // Add block q exactly: s in [q*s0, (q+1)*s0).
        Eigen::MatrixXd p = block_power;
        for (int r = 0; r < s0; ++r) {
            exact += operator_norm(p);
            p = a * p;
        }
        block_power = p;
        ++q;
    }
    throw NonConvergenceError("series_bound: tail failed to certify within the block cap");
}

Eigen::MatrixXd assemble_toeplitz(const Eigen::MatrixXd& a, int t, int cap) {
    const int d = static_cast<int>(a.rows());
    const long long n = static_cast<long long>(t) * d;
    if (n > cap) {
        std::ostringstream msg;
        msg << "assemble_toeplitz: t*d = " << n << " exceeds cap " << cap;
        throw CapacityError(msg.str());
    }
    Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(d, d);
    for (int diag = 0; diag < t; ++diag) {
        for (int i = diag; i < t; ++i)
            gamma.block((long long)i * d, (long long)(i - diag) * d, d, d) = power;
        power = a * power;
    }
    return gamma;
}

namespace {

// Largest singular value through lambda_max of the Gram matrix; iterative
// schemes stall on the clustered top singular values these Toeplitz
// factors produce, while the dense symmetric eigensolver stays fast up to
// the t*d cap and accurate to machine precision.
double largest_singular_value_gram(const Eigen::MatrixXd& g) {
    const Eigen::Index n = g.cols();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    h.selfadjointView<Eigen::Lower>().rankUpdate(g.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        h.selfadjointView<Eigen::Lower>(), Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace

double toeplitz_norm_explicit(const Eigen::MatrixXd& a, int t, int cap) {
    Eigen::MatrixXd gamma = assemble_toeplitz(a, t, cap);
    if (gamma.rows() <= 400) return operator_norm(gamma);
    return largest_singular_value_gram(gamma);
}

namespace {

double symbol_sup_on_grid(const std::vector<Eigen::MatrixXd>& powers, int grid_points) {
    const int d = static_cast<int>(powers[0].rows());
    const int t = static_cast<int>(powers.size());
    double sup = 0.0;
    for (int g = 0; g < grid_points; ++g) {
        const double x = static_cast<double>(g) / grid_points;
        Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(d, d);
        for (int k = 0; k < t; ++k) {
            const double phase = 2.0 * M_PI * k * x;
            s += std::complex<double>(std::cos(phase), std::sin(phase)) * powers[k];
        }
        sup = std::max(sup, operator_norm(s));
    }
    return sup;
}

std::vector<Eigen::MatrixXd> matrix_powers(const Eigen::MatrixXd& a, int t) {
    std::vector<Eigen::MatrixXd> powers;
    powers.reserve(t);
    powers.push_back(Eigen::MatrixXd::Identity(a.rows(), a.cols()));
    for (int k = 1; k < t; ++k) powers.push_back(a * powers.back());
    return powers;
}

}  // namespace

double toeplitz_norm_symbol(const Eigen::MatrixXd& a, int t, int grid_points) {
    if (grid_points < 2)
        throw std::invalid_argument("toeplitz_norm_symbol: grid_points must be >= 2");
    const auto powers = matrix_powers(a, t);
    // The doubled grid contains the coarse one, so the doubled sup is the
    // value; the gap between the two is the refinement residual.
    return symbol_sup_on_grid(powers, 2 * grid_points);
}

ToeplitzInfo toeplitz_info(const Eigen::MatrixXd& a, int t, int grid_points, int cap) {
    if (grid_points < 2)
        throw std::invalid_argument("toeplitz_info: grid_points must be >= 2");
    ToeplitzInfo info;
    info.t = t;
    const auto powers = matrix_powers(a, t);
    const double coarse = symbol_sup_on_grid(powers, grid_points);
    const double fine = symbol_sup_on_grid(powers, 2 * grid_points);
    info.symbol_bound = fine;
    info.symbol_refinement_residual = fine - coarse;
    info.series_bound = series_bound(a);
    if (static_cast<long long>(t) * a.rows() <= cap)
        info.explicit_norm = toeplitz_norm_explicit(a, t, cap);
    return info;
}

BoundReport evaluate_conditions(const Eigen::MatrixXd& a, double epsilon, double delta,
                                double c, double k_psi2, int t_max,
                                bool use_k4_scaling) {
    if (!(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("evaluate_conditions: epsilon, delta must lie in (0,1)");
    if (c <= 0.0) throw std::invalid_argument("evaluate_conditions: c must be positive");
    if (k_psi2 < 1.0) throw std::invalid_argument("evaluate_conditions: K must be >= 1");
    if (t_max < 1) throw std::invalid_argument("evaluate_conditions: t_max must be >= 1");

    BoundReport report;
    report.epsilon = epsilon;
    report.delta = delta;
    report.c_includes_k4 = use_k4_scaling;
    report.c = use_k4_scaling ? c * std::pow(k_psi2, 4) : c;
    report.j_a = series_bound(a);

    const int d = static_cast<int>(a.rows());
    const double log_term = std::log(1.0 / delta) + d;
    report.required_lambda_min =
        report.c * std::max(1.0 / (epsilon * epsilon), report.j_a * report.j_a) * log_term;
    report.lower_bound_lambda_min = report.c * log_term / (epsilon * epsilon);

    auto lambda_at = [&a](int t) { return gramian_sum(a, t).lambda_min; };

    // lambda_min(G_t) is nondecreasing in t (G_{t+1} - G_t = Gamma_t is PSD),
    // so double to bracket, then bisect.
    int hi = 1;
    while (hi < t_max && lambda_at(hi) < report.required_lambda_min) hi = std::min(2 * hi, t_max);
    if (lambda_at(hi) < report.required_lambda_min) {
        std::ostringstream msg;
        msg << "evaluate_conditions: condition unmet by t_max = " << t_max
            << " (lambda_min reached " << lambda_at(t_max) << ", required "
            << report.required_lambda_min << ")";
        throw CapacityError(msg.str());
    }
    int lo = hi / 2;  // lambda_at(lo) < required or lo == 0
    if (hi == 1) lo = 0;
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        if (lambda_at(mid) >= report.required_lambda_min)
            hi = mid;
        else
            lo = mid;
    }
    report.minimal_t = hi;
    report.lambda_min_at_minimal_t = lambda_at(hi);
    report.rate_bound = report.c * std::sqrt(log_term / report.lambda_min_at_minimal_t);
    return report;
}

}  // namespace sysid
