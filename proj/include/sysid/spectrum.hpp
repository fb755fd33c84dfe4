#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "sysid/gramian.hpp"
#include "sysid/lti.hpp"
#include "sysid/parallel.hpp"

namespace sysid {

struct IsometryReport {
    double defect = 0.0;          // ||(XM)^T XM - I||
    Eigen::VectorXd singulars;    // s_1(X) >= ... >= s_d(X)
    double epsilon_implied = 0.0; // root of max(eps, eps^2) = defect
    double predicted_low = 0.0;   // (1 - eps) / s_1(M)
    double predicted_high = 0.0;  // (1 + eps) / s_d(M)
    bool containment = false;
};

struct SphereNet {
    int d = 0;
    double eps = 0.0;
    std::vector<Eigen::VectorXd> points;  // unit vectors
    double verified_radius = 0.0;         // covering radius over the probe sample

    std::size_t cardinality() const { return points.size(); }
    // theoretical cap on any eps-separated set, (1 + 2/eps)^d
    double cardinality_cap() const;
};

struct ChaosStat {
    double value = 0.0;                     // |  ||XMu||^2 - 1 |, direct route
    std::optional<double> toeplitz_value;   // same quantity via sigma_Mu / Gamma / xi
    std::optional<double> frobenius_sq;     // ||sigma_Mu^T Gamma||_F^2 (must be 1)
};

struct HwTailReport {
    double eps = 0.0;
    int n_trials = 0;
    double empirical = 0.0;   // fraction with |  ||B xi||^2 - ||B||_F^2 | > eps ||B||_F^2
    double bound = 0.0;       // 2 exp(-c min(eps^2/K^4, eps/K^2) ||B||_F^2/||B||^2)
};

// Defect of XM as an approximate isometry, the observed spectrum of X,
// and the two-sided prediction implied by the defect.
IsometryReport isometry_defect(const Eigen::MatrixXd& x, const Eigen::MatrixXd& m);

// Greedy farthest-point covering of S^{d-1}. Stops when a full probe
// round of size probe_round finds no uncovered direction, then verifies
// the covering radius on verify_probes fresh directions. d <= 8.
SphereNet build_net(int d, double eps, std::uint64_t seed,
                    int probe_round = 4096, int verify_probes = 100000);

// Empirical covering radius of an arbitrary point set over fresh sampled
// probe directions (max over probes of the distance to the nearest point).
double verify_covering(const SphereNet& net, int probes, std::uint64_t seed);

enum class NetBoundMode { general, symmetric };

// Certified upper bound on ||W|| from net maxima: max ||Wx|| / (1 - eps)
// in general mode, max |x^T W x| / (1 - 2 eps) in symmetric mode
// (requires eps < 1/2).
double net_opnorm_bound(const Eigen::MatrixXd& w, const SphereNet& net,
                        NetBoundMode mode);

// |  ||XMu||^2 - 1 | computed directly and through the
// vec(X^T) = Gamma xi factorization with the block-diagonal stack of Mu.
// a is the dynamics matrix of the trajectory's system and m its whitener
// at the trajectory horizon. The two routes must agree to 1e-9
// (std::logic_error otherwise); above the Toeplitz cap only the direct
// route is computed.
ChaosStat chaos_statistic(const Trajectory& traj, const Eigen::MatrixXd& a,
                          const Eigen::MatrixXd& m, const Eigen::VectorXd& u,
                          int cap = kToeplitzCap);

// Empirical tail frequency of the quadratic-form deviation over seeded
// trials, against the parameterized theoretical bound.
HwTailReport hw_tail_estimate(const Eigen::MatrixXd& b, const NoiseFamily& noise,
                              double eps, int n_trials, std::uint64_t seed,
                              double c = 1.0,
                              ExecMode mode = ExecMode::parallel);

}  // namespace sysid
