#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace sysid {

enum class NoiseKind { gaussian, rademacher, uniform };

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& name);

// Zero-mean, unit-variance, independent coordinates; the vector is
// isotropic by construction. psi2 is the sub-gaussian norm of one
// coordinate: the root K of E[exp(X^2/K^2)] = 2.
struct NoiseFamily {
    NoiseKind kind = NoiseKind::gaussian;

    double psi2() const { return psi2_norm(kind); }

    static double psi2_norm(NoiseKind kind);
};

// Spectral radius: max |lambda| over eigenvalues. Throws
// std::invalid_argument on non-square or non-finite input.
double spectral_radius(const Eigen::MatrixXd& a);

// A stable LTI system x_{t+1} = A x_t + eta_{t+1}, x_0 = 0.
// Construction rejects rho(A) >= 1 and malformed A.
class SystemSpec {
  public:
    SystemSpec(Eigen::MatrixXd a, NoiseFamily noise);

    int dim() const { return static_cast<int>(a_.rows()); }
    const Eigen::MatrixXd& dynamics() const { return a_; }
    const NoiseFamily& noise() const { return noise_; }
    double rho() const { return rho_; }

    // FNV-1a over (d, noise kind, raw A bytes); identifies the spec in
    // serialized trajectories.
    std::uint64_t hash() const;

  private:
    Eigen::MatrixXd a_;
    NoiseFamily noise_;
    double rho_ = 0.0;
};

// One observed path. states holds x_1..x_{t+1} as rows (t+1 rows);
// noise_record holds eta_2..eta_{t+1} as rows (t rows). x_1 itself is the
// first noise draw eta_1, so the full noise that generated x_1..x_t is
// recoverable as (x_1, eta_2, ..., eta_t).
struct Trajectory {
    int horizon = 0;  // t: number of observed transitions
    Eigen::MatrixXd states;
    Eigen::MatrixXd noise_record;
    std::uint64_t seed = 0;
    std::uint64_t spec_hash = 0;

    int dim() const { return static_cast<int>(states.cols()); }

    // Covariates matrix X, rows x_1..x_t.
    Eigen::MatrixXd covariates() const { return states.topRows(horizon); }
    // Targets x_2..x_{t+1}, aligned with covariates rows.
    Eigen::MatrixXd targets() const { return states.bottomRows(horizon); }
    // E, rows eta_2..eta_{t+1}.
    const Eigen::MatrixXd& noise_matrix() const { return noise_record; }

    // Max over s of ||x_{s+1} - A x_s - eta_{s+1}||; zero in exact
    // arithmetic for any trajectory this module produced.
    double replay_residual(const Eigen::MatrixXd& a) const;
};

// Simulate t transitions. The stream index separates trials run under a
// common master seed; plain single-path callers leave it at 0. Identical
// (spec, t, seed, stream) reproduce bit-identical trajectories.
Trajectory simulate(const SystemSpec& spec, int t, std::uint64_t seed,
                    std::uint64_t stream = 0);

// Drive the recursion with a caller-supplied noise matrix whose rows are
// eta_1..eta_{t+1} (t+1 rows). Used by tests that need forced noise.
Trajectory simulate_with_noise(const SystemSpec& spec, const Eigen::MatrixXd& noise);

// One noise vector draw, exposed for the quadratic-form tail trials.
Eigen::VectorXd draw_noise_vector(const NoiseFamily& family, int d,
                                  std::uint64_t seed, std::uint64_t stream,
                                  std::uint64_t step);

}  // namespace sysid
