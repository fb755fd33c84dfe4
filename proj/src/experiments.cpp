#include "sysid/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sysid/errors.hpp"
#include "sysid/linalg.hpp"
#include "sysid/rng.hpp"
#include "sysid/spectrum.hpp"

namespace sysid {

void ExperimentConfig::validate() const {
    if (n_trials < 1) throw std::invalid_argument("config: n_trials must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("config: epsilon must lie in (0,1)");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("config: delta must lie in (0,1)");
    if (constant_c <= 0.0) throw std::invalid_argument("config: constant_c must be positive");
    for (std::size_t i = 0; i + 1 < t_grid.size(); ++i)
        if (t_grid[i] >= t_grid[i + 1])
            throw std::invalid_argument("config: t_grid must be strictly increasing");
    for (int t : t_grid)
        if (t < 1) throw std::invalid_argument("config: horizons must be >= 1");
}

namespace {

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t t, std::uint64_t index) {
    return rng::draw_u64(master, t, index, 0x74726c);
}

TrialBatch aggregate(std::vector<TrialRecord> trials, int t, double epsilon,
                     double delta) {
    TrialBatch batch;
    batch.t = t;
    batch.epsilon = epsilon;
    batch.delta = delta;
    for (const TrialRecord& r : trials) {
        if (r.degenerate || r.error > epsilon) ++batch.failures;
        if (r.degenerate) ++batch.degenerate_count;
    }
    const auto n = static_cast<long long>(trials.size());
    batch.failure_frequency = static_cast<double>(batch.failures) / n;
    batch.wilson = wilson_interval(batch.failures, n);

    std::vector<double> errors;
    errors.reserve(trials.size());
    for (const TrialRecord& r : trials) errors.push_back(r.error);
    batch.median_error = order_statistic_quantile(errors, 0.5);
    batch.quantile_error = order_statistic_quantile(errors, 1.0 - delta);
    batch.trials = std::move(trials);
    return batch;
}

}  // namespace

TrialBatch pac_experiment(const ExperimentConfig& cfg, int t) {
    cfg.validate();
    const SystemSpec spec(cfg.a, cfg.noise);
    const GramianSummary gs = gramian_sum(cfg.a, t);
    // S = M^{-2} / 2 = (Gramian sum) / 2, exactly as the proof defines it.
    const Eigen::MatrixXd s_reg = 0.5 * gs.gramian_sum;
    const double k = cfg.noise.psi2();

    std::vector<TrialRecord> trials(cfg.n_trials);
    for_each_index(cfg.mode, static_cast<std::size_t>(cfg.n_trials), [&](std::size_t i) {
        TrialRecord rec;
        rec.seed = trial_seed(cfg.master_seed, static_cast<std::uint64_t>(t), i);
        const Trajectory traj = simulate(spec, t, rec.seed, 0);
        const OlsEstimate est = ols(traj, &spec.dynamics());
        rec.error = *est.error_opnorm;
        rec.degenerate = est.degenerate;
        rec.event_e2 =
            isometry_defect(traj.covariates(), gs.whitener).defect <= 0.5;
        rec.selfnorm_value =
            self_normalized_stat(traj, s_reg, cfg.delta, k, cfg.constant_c).value;
        trials[i] = rec;
    });
    return aggregate(std::move(trials), t, cfg.epsilon, cfg.delta);
}

DecayFit decay_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.t_grid.size() < 3)
        throw std::invalid_argument("decay_experiment: need at least 3 grid points");
    if (cfg.t_grid.back() < 10 * cfg.t_grid.front())
        throw std::invalid_argument("decay_experiment: t_grid must span at least a decade");

    const int d = static_cast<int>(cfg.a.rows());
    const double log_term = std::log(1.0 / cfg.delta) + d;

    DecayFit fit;
    std::vector<double> log_lambda, log_quantile;
    for (int t : cfg.t_grid) {
        const TrialBatch batch = pac_experiment(cfg, t);
        DecayPoint p;
        p.t = t;
        p.lambda_min = gramian_sum(cfg.a, t).lambda_min;
        p.median_error = batch.median_error;
        p.quantile_error = batch.quantile_error;
        p.implied_constant = batch.quantile_error * std::sqrt(p.lambda_min / log_term);
        p.rate_rhs = cfg.constant_c * std::sqrt(log_term / p.lambda_min);
        fit.points.push_back(p);
        log_lambda.push_back(std::log(p.lambda_min));
        log_quantile.push_back(std::log(p.quantile_error));
    }
    fit.slope = fit_slope(log_lambda, log_quantile);
    double lo = fit.points.front().implied_constant, hi = lo;
    for (const DecayPoint& p : fit.points) {
        lo = std::min(lo, p.implied_constant);
        hi = std::max(hi, p.implied_constant);
    }
    fit.c_hat = hi;
    fit.c_spread = hi / lo;
    return fit;
}

double spectrum_coverage(const ExperimentConfig& cfg, int t, double epsilon) {
    cfg.validate();
    if (epsilon <= 0.0)
        throw std::invalid_argument("spectrum_coverage: epsilon must be positive");
    const SystemSpec spec(cfg.a, cfg.noise);
    const GramianSummary gs = gramian_sum(cfg.a, t);
    const double k2 = cfg.noise.psi2() * cfg.noise.psi2();

    const Eigen::VectorXd m_singulars = singular_values(gs.whitener);
    const double low = (1.0 - k2 * epsilon) / gs.whitener_norm;
    const double high = (1.0 + k2 * epsilon) / m_singulars(m_singulars.size() - 1);

    std::vector<unsigned char> contained(cfg.n_trials, 0);
    for_each_index(cfg.mode, static_cast<std::size_t>(cfg.n_trials), [&](std::size_t i) {
        const std::uint64_t seed =
            trial_seed(cfg.master_seed, static_cast<std::uint64_t>(t), i);
        const Trajectory traj = simulate(spec, t, seed, 0);
        const Eigen::VectorXd sv = singular_values(traj.covariates());
        contained[i] = (low <= sv(sv.size() - 1) && sv(0) <= high) ? 1 : 0;
    });
    long long count = 0;
    for (unsigned char v : contained) count += v;
    return static_cast<double>(count) / cfg.n_trials;
}

ProofDiagnostics proof_diagnostics(const Trajectory& traj, const SystemSpec& spec,
                                   double epsilon, double delta, double k_psi2,
                                   double c) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("proof_diagnostics: epsilon <= 0");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("proof_diagnostics: delta must lie in (0,1)");

    const int d = spec.dim();
    const GramianSummary gs = gramian_sum(spec.dynamics(), traj.horizon);
    const Eigen::MatrixXd s_reg = 0.5 * gs.gramian_sum;

    ProofDiagnostics diag;
    diag.epsilon = epsilon;
    diag.delta = delta;
    diag.k_psi2 = k_psi2;
    diag.c = c;
    diag.lambda_min = gs.lambda_min;
    diag.defect = isometry_defect(traj.covariates(), gs.whitener).defect;
    diag.event_e2 = diag.defect <= 0.5;

    // beta = sqrt(s_d(S)); with S = M^{-2}/2 this equals 1/(sqrt(2)||M||).
    const Eigen::VectorXd s_singulars = singular_values(s_reg);
    diag.beta = std::sqrt(s_singulars(s_singulars.size() - 1));
    diag.beta_identity_residual = std::abs(
        diag.beta * diag.beta - 1.0 / (2.0 * gs.whitener_norm * gs.whitener_norm));

    const SelfNormStat at_delta = self_normalized_stat(traj, s_reg, delta, k_psi2, c);
    const SelfNormStat at_half = self_normalized_stat(traj, s_reg, delta / 2.0, k_psi2, c);
    diag.selfnorm_value = at_delta.value;
    diag.selfnorm_bound = at_delta.bound;
    diag.selfnorm_threshold = at_half.bound;
    diag.selfnorm_ok = diag.selfnorm_value <= diag.selfnorm_threshold;

    diag.j_a = series_bound(spec.dynamics());
    diag.tau1 = 16.0 * std::pow(k_psi2, 4) * diag.j_a * diag.j_a / c *
                (std::log(4.0 / delta) + d * std::log(9.0));
    diag.tau2 = 16.0 * c * k_psi2 * k_psi2 / (epsilon * epsilon) *
                (std::log(2.0 / delta) + d * std::log(10.0));
    diag.condition12 = diag.lambda_min >= diag.tau1;
    diag.condition13 = diag.lambda_min >= diag.tau2;

    const OlsEstimate est = ols(traj, &spec.dynamics());
    diag.realized_error = *est.error_opnorm;
    diag.gram_full_rank = !est.degenerate;
    diag.chain_bound = std::sqrt(2.0) * diag.selfnorm_value / diag.beta;
    return diag;
}

void CalibrationConfig::validate() const {
    if (family.size() < 3)
        throw std::invalid_argument("calibration: need a family of >= 3 systems");
    if (probe_trials < 1)
        throw std::invalid_argument("calibration: probe_trials must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("calibration: epsilon, delta must lie in (0,1)");
    if (!(c_lo > 0.0 && c_hi > c_lo))
        throw std::invalid_argument("calibration: need 0 < c_lo < c_hi");
}

namespace {

bool calibration_probe(const CalibrationConfig& cfg, double c, int probe_index) {
    for (std::size_t sys = 0; sys < cfg.family.size(); ++sys) {
        const double k = cfg.noise.psi2();
        BoundReport report;
        try {
            report = evaluate_conditions(cfg.family[sys], cfg.epsilon, cfg.delta, c, k,
                                         cfg.t_max);
        } catch (const CapacityError&) {
            return false;  // condition unreachable by t_max at this c
        }
        ExperimentConfig probe;
        probe.a = cfg.family[sys];
        probe.noise = cfg.noise;
        probe.epsilon = cfg.epsilon;
        probe.delta = cfg.delta;
        probe.n_trials = cfg.probe_trials;
        probe.master_seed =
            rng::draw_u64(cfg.master_seed, static_cast<std::uint64_t>(probe_index),
                          static_cast<std::uint64_t>(sys), 0x70726f62);
        probe.constant_c = c;
        probe.mode = cfg.mode;
        const TrialBatch batch = pac_experiment(probe, report.minimal_t);
        if (batch.failure_frequency > cfg.delta) return false;
    }
    return true;
}

}  // namespace

CalibrationResult calibrate_constant(const CalibrationConfig& cfg) {
    cfg.validate();
    CalibrationResult result;

    int probe_index = 0;
    if (!calibration_probe(cfg, cfg.c_hi, probe_index++)) {
        result.c_hat = std::numeric_limits<double>::quiet_NaN();
        result.bracket_lo = cfg.c_hi;
        result.bracket_hi = std::numeric_limits<double>::infinity();
        result.status = "infeasible";
        return result;
    }
    if (calibration_probe(cfg, cfg.c_lo, probe_index++)) {
        result.c_hat = cfg.c_lo;
        result.bracket_lo = cfg.c_lo;
        result.bracket_hi = cfg.c_lo;
        result.status = "at_lower_edge";
        return result;
    }

    double lo = cfg.c_lo, hi = cfg.c_hi;  // lo infeasible, hi feasible
    while (hi / lo > 1.05) {
        const double mid = std::sqrt(lo * hi);
        if (calibration_probe(cfg, mid, probe_index++))
            hi = mid;
        else
            lo = mid;
    }
    result.c_hat = hi;
    result.bracket_lo = lo;
    result.bracket_hi = hi;
    result.status = "converged";
    return result;
}

}  // namespace sysid
