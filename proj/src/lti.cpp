#include "sysid/lti.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "sysid/linalg.hpp"
#include "sysid/rng.hpp"

namespace sysid {

std::string to_string(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::gaussian: return "gaussian";
        case NoiseKind::rademacher: return "rademacher";
        case NoiseKind::uniform: return "uniform";
    }
    throw std::logic_error("unreachable noise kind");
}

NoiseKind noise_kind_from_string(const std::string& name) {
    if (name == "gaussian") return NoiseKind::gaussian;
    if (name == "rademacher") return NoiseKind::rademacher;
    if (name == "uniform") return NoiseKind::uniform;
    throw std::invalid_argument("unknown noise kind: " + name);
}

namespace {

// E[exp(X^2/K^2)] for X uniform on [-sqrt(3), sqrt(3)], via composite
// Simpson on the half interval. The integrand is smooth; 1<<12 panels put
// the quadrature error far below the 1e-10 root tolerance.
double uniform_mgf_of_square(double k) {
    const double alpha = 3.0 / (k * k);
    const int n = 1 << 12;
    const double h = 1.0 / n;
    double sum = 1.0 + std::exp(alpha);  // endpoints, f(u) = exp(alpha u^2)
    for (int i = 1; i < n; ++i) {
        const double u = i * h;
        sum += (i % 2 == 0 ? 2.0 : 4.0) * std::exp(alpha * u * u);
    }
    return sum * h / 3.0;
}

double uniform_psi2() {
    // E exp(X^2/K^2) is decreasing in K; bracket and bisect to 1e-12.
    double lo = 1.0, hi = 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (uniform_mgf_of_square(mid) > 2.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double NoiseFamily::psi2_norm(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::gaussian:
            // E exp(X^2/K^2) = (1 - 2/K^2)^{-1/2} = 2  =>  K^2 = 8/3.
            return std::sqrt(8.0 / 3.0);
        case NoiseKind::rademacher:
            // exp(1/K^2) = 2.
            return 1.0 / std::sqrt(std::log(2.0));
        case NoiseKind::uniform: {
            static const double k = uniform_psi2();
            return k;
        }
    }
    throw std::logic_error("unreachable noise kind");
}

double spectral_radius(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols() || a.rows() == 0)
        throw std::invalid_argument("spectral_radius: matrix must be square and non-empty");
    if (!is_finite(a))
        throw std::invalid_argument("spectral_radius: matrix has non-finite entries");
    Eigen::EigenSolver<Eigen::MatrixXd> es(a, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

SystemSpec::SystemSpec(Eigen::MatrixXd a, NoiseFamily noise)
    : a_(std::move(a)), noise_(noise) {
    if (a_.rows() != a_.cols() || a_.rows() == 0)
        throw std::invalid_argument("SystemSpec: dynamics matrix must be square, d >= 1");
    if (!is_finite(a_))
        throw std::invalid_argument("SystemSpec: dynamics matrix has non-finite entries");
    rho_ = spectral_radius(a_);
    if (rho_ >= 1.0)
        throw std::invalid_argument("SystemSpec: system is not stable (rho(A) >= 1)");
}

std::uint64_t SystemSpec::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto absorb = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xffULL;
            h *= 0x100000001b3ULL;
        }
    };
    absorb(static_cast<std::uint64_t>(dim()));
    absorb(static_cast<std::uint64_t>(noise_.kind));
    for (int i = 0; i < a_.rows(); ++i)
        for (int j = 0; j < a_.cols(); ++j) {
            std::uint64_t bits;
            const double v = a_(i, j);
            static_assert(sizeof(bits) == sizeof(v));
            std::memcpy(&bits, &v, sizeof(bits));
            absorb(bits);
        }
    return h;
}

double Trajectory::replay_residual(const Eigen::MatrixXd& a) const {
    double worst = 0.0;
    for (int s = 0; s < horizon; ++s) {
        // Recompute with the same expression shape simulate used, so the
        // replay is bit-exact, not merely close.
        const Eigen::VectorXd x = states.row(s).transpose();
        const Eigen::VectorXd eta = noise_record.row(s).transpose();
        const Eigen::VectorXd next = a * x + eta;
        worst = std::max(worst, (states.row(s + 1).transpose() - next).norm());
    }
    return worst;
}

namespace {

double draw_coordinate(NoiseKind kind, std::uint64_t seed, std::uint64_t stream,
                       std::uint64_t step, std::uint64_t lane) {
    switch (kind) {
        case NoiseKind::gaussian: return rng::draw_gaussian(seed, stream, step, lane);
        case NoiseKind::rademacher: return rng::draw_rademacher(seed, stream, step, lane);
        case NoiseKind::uniform: return rng::draw_uniform_isotropic(seed, stream, step, lane);
    }
    throw std::logic_error("unreachable noise kind");
}

}  // namespace

Eigen::VectorXd draw_noise_vector(const NoiseFamily& family, int d,
                                  std::uint64_t seed, std::uint64_t stream,
                                  std::uint64_t step) {
    Eigen::VectorXd v(d);
    for (int j = 0; j < d; ++j)
        v(j) = draw_coordinate(family.kind, seed, stream, step, static_cast<std::uint64_t>(j));
    return v;
}

Trajectory simulate(const SystemSpec& spec, int t, std::uint64_t seed,
                    std::uint64_t stream) {
    if (t < 1) throw std::invalid_argument("simulate: horizon t must be >= 1");
    const int d = spec.dim();

    Trajectory traj;
    traj.horizon = t;
    traj.seed = seed;
    traj.spec_hash = spec.hash();
    traj.states.resize(t + 1, d);
    traj.noise_record.resize(t, d);

    // Noise steps are 1-based: eta_s drawn at step s. x_1 = eta_1.
    Eigen::VectorXd x = draw_noise_vector(spec.noise(), d, seed, stream, 1);
    traj.states.row(0) = x.transpose();
    for (int s = 1; s <= t; ++s) {
        Eigen::VectorXd eta =
            draw_noise_vector(spec.noise(), d, seed, stream, static_cast<std::uint64_t>(s + 1));
        x = spec.dynamics() * x + eta;
        traj.states.row(s) = x.transpose();
        traj.noise_record.row(s - 1) = eta.transpose();
    }
    return traj;
}

Trajectory simulate_with_noise(const SystemSpec& spec, const Eigen::MatrixXd& noise) {
    if (noise.cols() != spec.dim())
        throw std::invalid_argument("simulate_with_noise: noise dimension mismatch");
    if (noise.rows() < 2)
        throw std::invalid_argument("simulate_with_noise: need at least eta_1 and eta_2");
    const int t = static_cast<int>(noise.rows()) - 1;
    const int d = spec.dim();

    Trajectory traj;
    traj.horizon = t;
    traj.seed = 0;
    traj.spec_hash = spec.hash();
    traj.states.resize(t + 1, d);
    traj.noise_record = noise.bottomRows(t);

    Eigen::VectorXd x = noise.row(0).transpose();
    traj.states.row(0) = x.transpose();
    for (int s = 1; s <= t; ++s) {
        x = spec.dynamics() * x + noise.row(s).transpose();
        traj.states.row(s) = x.transpose();
    }
    return traj;
}

}  // namespace sysid
