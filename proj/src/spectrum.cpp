#include "sysid/spectrum.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sysid/errors.hpp"
#include "sysid/linalg.hpp"
#include "sysid/rng.hpp"

namespace sysid {

namespace {

// Containment comparisons carry a small relative slack: the lemma holds
// with exact reals and the implied epsilon sits exactly on the boundary.
constexpr double kContainSlack = 1e-9;

Eigen::VectorXd random_direction(int d, std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t step) {
    Eigen::VectorXd v(d);
    while (true) {
        for (int j = 0; j < d; ++j)
            v(j) = rng::draw_gaussian(seed, stream, step, static_cast<std::uint64_t>(j));
        const double n = v.norm();
        if (n > 1e-12) return v / n;
        ++step;  // astronomically unlikely; redraw from the next step
    }
}

}  // namespace

double SphereNet::cardinality_cap() const {
    return std::pow(1.0 + 2.0 / eps, d);
}

IsometryReport isometry_defect(const Eigen::MatrixXd& x, const Eigen::MatrixXd& m) {
    if (x.cols() != m.rows() || m.rows() != m.cols())
        throw std::invalid_argument("isometry_defect: dimension mismatch between X and M");

    const int d = static_cast<int>(x.cols());
    const Eigen::MatrixXd xm = x * m;
    IsometryReport report;
    report.defect = sym_opnorm(xm.transpose() * xm - Eigen::MatrixXd::Identity(d, d));
    report.singulars = singular_values(x);

    // max(eps, eps^2) = defect: identity branch for defect <= 1, sqrt above.
    report.epsilon_implied = report.defect <= 1.0 ? report.defect : std::sqrt(report.defect);

    const Eigen::VectorXd ms = singular_values(m);
    const double s1_m = ms(0);
    const double sd_m = ms(ms.size() - 1);
    report.predicted_low = (1.0 - report.epsilon_implied) / s1_m;
    report.predicted_high = (1.0 + report.epsilon_implied) / sd_m;

    const double sd_x = report.singulars(report.singulars.size() - 1);
    const double s1_x = report.singulars(0);
    const double slack_low = kContainSlack * std::max(1.0, std::abs(report.predicted_low));
    const double slack_high = kContainSlack * std::max(1.0, std::abs(report.predicted_high));
    report.containment = report.predicted_low <= sd_x + slack_low &&
                         s1_x <= report.predicted_high + slack_high;
    return report;
}

SphereNet build_net(int d, double eps, std::uint64_t seed, int probe_round,
                    int verify_probes) {
    if (d < 1) throw std::invalid_argument("build_net: d must be >= 1");
    if (d > 8) throw CapacityError("build_net: d > 8 not supported (net size explodes)");
    if (eps <= 0.0) throw std::invalid_argument("build_net: eps must be positive");

    SphereNet net;
    net.d = d;
    net.eps = eps;

    if (d == 1) {
        // S^0 = {-1, +1}; the greedy loop below would find both anyway.
        net.points.push_back(Eigen::VectorXd::Constant(1, 1.0));
        if (eps < 2.0) net.points.push_back(Eigen::VectorXd::Constant(1, -1.0));
        net.verified_radius = verify_covering(net, verify_probes, seed);
        return net;
    }

    // Greedy saturation at an inner radius 0.9 eps. Saturating at eps
    // itself leaves slivers marginally beyond eps that fresh probes keep
    // finding; with the margin, any direction still uncovered at eps owns
    // an uncovered cap of chord 0.1 eps that the probe stream hits with
    // overwhelming probability. The separation stays > 0.9 eps, which
    // keeps the cardinality within the (1 + 2/eps)^d budget for every
    // supported dimension (checked by tests).
    const double inner = 0.9 * eps;
    auto covered_at = [&](const Eigen::VectorXd& probe, double radius) {
        for (const auto& q : net.points)
            if ((probe - q).norm() <= radius) return true;
        return false;
    };

    std::uint64_t step = 0;
    bool clean = false;
    while (!clean) {
        bool added = true;
        while (added) {
            added = false;
            for (int p = 0; p < probe_round; ++p) {
                const Eigen::VectorXd probe = random_direction(d, seed, 1, step++);
                if (!covered_at(probe, inner)) {
                    net.points.push_back(probe);
                    added = true;
                }
            }
        }
        // Fresh scan at the inner radius; any straggler joins the net and
        // forces a rescan.
        clean = true;
        for (int p = 0; p < verify_probes; ++p) {
            const Eigen::VectorXd probe = random_direction(d, seed, 3, step++);
            if (!covered_at(probe, inner)) {
                net.points.push_back(probe);
                clean = false;
            }
        }
    }
    net.verified_radius = verify_covering(net, verify_probes, seed);
    return net;
}

double verify_covering(const SphereNet& net, int probes, std::uint64_t seed) {
    if (net.points.empty()) throw std::invalid_argument("verify_covering: empty net");
    double worst = 0.0;
    for (int p = 0; p < probes; ++p) {
        const Eigen::VectorXd probe =
            net.d == 1
                ? Eigen::VectorXd::Constant(
                      1, rng::draw_rademacher(seed, 2, static_cast<std::uint64_t>(p), 0))
                : random_direction(net.d, seed, 2, static_cast<std::uint64_t>(p));
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& q : net.points) nearest = std::min(nearest, (probe - q).norm());
        worst = std::max(worst, nearest);
    }
    return worst;
}

double net_opnorm_bound(const Eigen::MatrixXd& w, const SphereNet& net,
                        NetBoundMode mode) {
    if (w.cols() != net.d)
        throw std::invalid_argument("net_opnorm_bound: net dimension does not match W");
    if (net.points.empty()) throw std::invalid_argument("net_opnorm_bound: empty net");

    if (mode == NetBoundMode::symmetric) {
        if (net.eps >= 0.5)
            throw std::invalid_argument("net_opnorm_bound: symmetric mode needs eps < 1/2");
        if (w.rows() != w.cols())
            throw std::invalid_argument("net_opnorm_bound: symmetric mode needs square W");
        double best = 0.0;
        for (const auto& x : net.points)
            best = std::max(best, std::abs(double(x.transpose() * w * x)));
        return best / (1.0 - 2.0 * net.eps);
    }
    double best = 0.0;
    for (const auto& x : net.points) best = std::max(best, (w * x).norm());
    return best / (1.0 - net.eps);
}

ChaosStat chaos_statistic(const Trajectory& traj, const Eigen::MatrixXd& a,
                          const Eigen::MatrixXd& m, const Eigen::VectorXd& u, int cap) {
    const int d = traj.dim();
    const int t = traj.horizon;
    if (a.rows() != d || a.cols() != d)
        throw std::invalid_argument("chaos_statistic: A has wrong shape");
    if (m.rows() != d || m.cols() != d)
        throw std::invalid_argument("chaos_statistic: M has wrong shape");
    if (u.size() != d) throw std::invalid_argument("chaos_statistic: u has wrong dimension");
    if (std::abs(u.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("chaos_statistic: u must be a unit vector");

    ChaosStat stat;
    const Eigen::MatrixXd x = traj.covariates();
    stat.value = std::abs((x * m * u).squaredNorm() - 1.0);

    if (static_cast<long long>(t) * d > cap) return stat;  // direct route only

    // xi stacks the noise that generated x_1..x_t: eta_1 = x_1, then
    // eta_2..eta_t from the record.
    Eigen::VectorXd xi(static_cast<long long>(t) * d);
    xi.segment(0, d) = traj.states.row(0).transpose();
    for (int s = 1; s < t; ++s)
        xi.segment(static_cast<long long>(s) * d, d) = traj.noise_record.row(s - 1).transpose();

    const Eigen::MatrixXd gamma = assemble_toeplitz(a, t, cap);

    // sigma_Mu^T Gamma, row i = (Mu)^T (block row i of Gamma).
    const Eigen::VectorXd mu = m * u;
    Eigen::MatrixXd sg(t, static_cast<long long>(t) * d);
    for (int i = 0; i < t; ++i)
        sg.row(i) = mu.transpose() * gamma.middleRows(static_cast<long long>(i) * d, d);

    stat.frobenius_sq = sg.squaredNorm();
    stat.toeplitz_value = std::abs((sg * xi).squaredNorm() - 1.0);

    if (std::abs(*stat.toeplitz_value - stat.value) > 1e-9)
        throw std::logic_error("chaos_statistic: direct and Toeplitz routes disagree");
    if (std::abs(*stat.frobenius_sq - 1.0) > 1e-8)
        throw std::logic_error("chaos_statistic: ||sigma_Mu^T Gamma||_F^2 != 1");
    return stat;
}

HwTailReport hw_tail_estimate(const Eigen::MatrixXd& b, const NoiseFamily& noise,
                              double eps, int n_trials, std::uint64_t seed, double c,
                              ExecMode mode) {
    if (eps <= 0.0) throw std::invalid_argument("hw_tail_estimate: eps must be positive");
    if (n_trials < 1) throw std::invalid_argument("hw_tail_estimate: n_trials must be >= 1");

    const int d = static_cast<int>(b.cols());
    const double frob_sq = b.squaredNorm();
    const double op = operator_norm(b);

    std::vector<unsigned char> exceed(n_trials, 0);
    for_each_index(mode, static_cast<std::size_t>(n_trials), [&](std::size_t i) {
        const Eigen::VectorXd xi =
            draw_noise_vector(noise, d, seed, static_cast<std::uint64_t>(i), 0);
        const double dev = std::abs((b * xi).squaredNorm() - frob_sq);
        exceed[i] = dev > eps * frob_sq ? 1 : 0;
    });

    HwTailReport report;
    report.eps = eps;
    report.n_trials = n_trials;
    long long count = 0;
    for (unsigned char e : exceed) count += e;
    report.empirical = static_cast<double>(count) / n_trials;

    const double k = noise.psi2();
    const double k2 = k * k;
    const double ratio = frob_sq / (op * op);
    report.bound =
        2.0 * std::exp(-c * std::min(eps * eps / (k2 * k2), eps / k2) * ratio);
    return report;
}

}  // namespace sysid
