#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "sysid/estimator.hpp"
#include "sysid/gramian.hpp"
#include "sysid/lti.hpp"
#include "sysid/parallel.hpp"
#include "sysid/stats.hpp"

namespace sysid {

struct ExperimentConfig {
    Eigen::MatrixXd a;
    NoiseFamily noise;
    std::vector<int> t_grid;
    double epsilon = 0.2;
    double delta = 0.1;
    int n_trials = 100;
    std::uint64_t master_seed = 1729;
    double constant_c = 1.0;
    ExecMode mode = ExecMode::parallel;

    void validate() const;  // throws std::invalid_argument
};

struct TrialRecord {
    std::uint64_t seed = 0;   // derived as hash(master_seed, t, trial index)
    double error = 0.0;       // ||A_hat - A||
    bool event_e2 = false;    // isometry defect <= 1/2
    double selfnorm_value = 0.0;
    bool degenerate = false;  // rank-deficient Gram; counted as a failure
};

struct TrialBatch {
    int t = 0;
    double epsilon = 0.0;
    double delta = 0.0;
    std::vector<TrialRecord> trials;
    long long failures = 0;  // error > epsilon, or degenerate
    long long degenerate_count = 0;
    double failure_frequency = 0.0;
    double median_error = 0.0;
    double quantile_error = 0.0;  // order 1 - delta
    WilsonInterval wilson;
};

struct DecayPoint {
    int t = 0;
    double lambda_min = 0.0;
    double median_error = 0.0;
    double quantile_error = 0.0;   // order 1 - delta
    double implied_constant = 0.0; // quantile * sqrt(lambda_min / (log(1/delta) + d))
    double rate_rhs = 0.0;         // c * sqrt((log(1/delta) + d) / lambda_min)
};

struct DecayFit {
    std::vector<DecayPoint> points;
    double slope = 0.0;       // log(quantile) against log(lambda_min)
    double c_hat = 0.0;       // max of implied constants over the grid
    double c_spread = 0.0;    // max/min ratio of implied constants
};

// Every intermediate of the proof chain evaluated on one realized path.
struct ProofDiagnostics {
    double epsilon = 0.0;
    double delta = 0.0;
    double k_psi2 = 0.0;
    double c = 0.0;
    double lambda_min = 0.0;       // = 1 / ||M||^2
    double defect = 0.0;
    bool event_e2 = false;         // defect <= 1/2
    double beta = 0.0;             // sqrt(s_d(S)), S = M^{-2}/2
    double beta_identity_residual = 0.0;  // |beta^2 - 1/(2||M||^2)|
    double selfnorm_value = 0.0;
    double selfnorm_bound = 0.0;       // tail bound at delta
    double selfnorm_threshold = 0.0;   // same bound at delta/2 (the half-budget split)
    bool selfnorm_ok = false;          // value <= threshold
    double j_a = 0.0;
    double tau1 = 0.0;
    double tau2 = 0.0;
    bool condition12 = false;  // lambda_min >= tau1
    bool condition13 = false;  // lambda_min >= tau2
    double realized_error = 0.0;
    double chain_bound = 0.0;  // sqrt(2) * selfnorm_value / beta; exact path-wise bound
    bool gram_full_rank = false;
};

struct CalibrationConfig {
    std::vector<Eigen::MatrixXd> family;
    NoiseFamily noise;
    double epsilon = 0.2;
    double delta = 0.1;
    int probe_trials = 20;
    int t_max = 1 << 20;
    std::uint64_t master_seed = 1729;
    double c_lo = 1.0 / 64.0;
    double c_hi = 64.0;
    ExecMode mode = ExecMode::parallel;

    void validate() const;
};

struct CalibrationResult {
    double c_hat = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    // "converged": bisection closed the bracket; "at_lower_edge": even c_lo
    // was feasible; "infeasible": c_hi failed, bracket reports (c_hi, inf).
    std::string status;
};

// n_trials independent simulations at horizon t with derived seeds; OLS
// error, proof-event indicator, self-normalized value per trial. Trials
// fill index-addressed slots, so parallel and serial execution produce
// identical batches.
TrialBatch pac_experiment(const ExperimentConfig& cfg, int t);

// Per-horizon error quantiles over cfg.t_grid, slope of the log-log decay
// against lambda_min, and the implied constant.
DecayFit decay_experiment(const ExperimentConfig& cfg);

// Fraction of trials in which the two-sided singular-value containment
// holds at the given epsilon.
double spectrum_coverage(const ExperimentConfig& cfg, int t, double epsilon);

// The proof chain on one realized path.
ProofDiagnostics proof_diagnostics(const Trajectory& traj, const SystemSpec& spec,
                                   double epsilon, double delta, double k_psi2,
                                   double c);

// Smallest c in [c_lo, c_hi] whose implied minimal horizon passes a
// Monte Carlo probe (failure frequency <= delta) on every system of the
// family; log-scale bisection.
CalibrationResult calibrate_constant(const CalibrationConfig& cfg);

}  // namespace sysid
