#include "sysid/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

namespace sysid::io {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty())
        throw std::invalid_argument("matrix: expected a non-empty array of rows");
    const std::size_t rows = j.size();
    if (!j[0].is_array() || j[0].empty())
        throw std::invalid_argument("matrix: row 0 is not a non-empty array");
    const std::size_t cols = j[0].size();
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols) {
            std::ostringstream msg;
            msg << "matrix: row " << i << " has " << j[i].size()
                << " entries, expected " << cols << " (non-rectangular)";
            throw std::invalid_argument(msg.str());
        }
        for (std::size_t k = 0; k < cols; ++k) {
            if (!j[i][k].is_number()) {
                std::ostringstream msg;
                msg << "matrix: entry (" << i << "," << k << ") is not a number";
                throw std::invalid_argument(msg.str());
            }
            const double v = j[i][k].get<double>();
            if (!std::isfinite(v)) {
                std::ostringstream msg;
                msg << "matrix: entry (" << i << "," << k << ") is not finite";
                throw std::invalid_argument(msg.str());
            }
            m(i, k) = v;
        }
    }
    return m;
}

Eigen::MatrixXd parse_matrix_arg(const std::string& arg) {
    std::string text = arg;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos)
        throw std::invalid_argument("matrix argument is empty");
    if (text[first] != '[') {
        std::ifstream in(arg);
        if (!in) throw std::invalid_argument("cannot open matrix file: " + arg);
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("matrix: JSON parse error: ") + e.what());
    }
    return matrix_from_json(j);
}

namespace {

// NaN and infinities do not survive JSON numbers; encode them as null.
json num_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

double num_from(const json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return j.get<double>();
}

}  // namespace

json to_json(const Trajectory& traj) {
    return json{{"t", traj.horizon},
                {"states", matrix_to_json(traj.states)},
                {"noise_record", matrix_to_json(traj.noise_record)},
                {"seed", traj.seed},
                {"spec_hash", traj.spec_hash}};
}

Trajectory trajectory_from_json(const json& j) {
    Trajectory traj;
    traj.horizon = j.at("t").get<int>();
    traj.states = matrix_from_json(j.at("states"));
    traj.noise_record = matrix_from_json(j.at("noise_record"));
    traj.seed = j.at("seed").get<std::uint64_t>();
    traj.spec_hash = j.at("spec_hash").get<std::uint64_t>();
    if (traj.states.rows() != traj.horizon + 1)
        throw std::invalid_argument("trajectory: states must hold t+1 rows");
    if (traj.noise_record.rows() != traj.horizon)
        throw std::invalid_argument("trajectory: noise_record must hold t rows");
    if (traj.noise_record.cols() != traj.states.cols())
        throw std::invalid_argument("trajectory: state and noise dimensions differ");
    return traj;
}

json to_json(const OlsEstimate& est) {
    json j{{"a_hat", matrix_to_json(est.a_hat)},
           {"gram", matrix_to_json(est.gram)},
           {"gram_rank", est.gram_rank},
           {"pinv_threshold_used", est.pinv_threshold_used},
           {"degenerate", est.degenerate}};
    if (est.error_opnorm) j["error_opnorm"] = *est.error_opnorm;
    return j;
}

OlsEstimate ols_estimate_from_json(const json& j) {
    OlsEstimate est;
    est.a_hat = matrix_from_json(j.at("a_hat"));
    est.gram = matrix_from_json(j.at("gram"));
    est.gram_rank = j.at("gram_rank").get<int>();
    est.pinv_threshold_used = j.at("pinv_threshold_used").get<double>();
    est.degenerate = j.at("degenerate").get<bool>();
    if (j.contains("error_opnorm")) est.error_opnorm = j.at("error_opnorm").get<double>();
    return est;
}

json to_json(const GramianSummary& gs) {
    return json{{"t", gs.t},
                {"gramian_sum", matrix_to_json(gs.gramian_sum)},
                {"lambda_min", gs.lambda_min},
                {"whitener", matrix_to_json(gs.whitener)},
                {"whitener_norm", gs.whitener_norm}};
}

json to_json(const ToeplitzInfo& info) {
    json j{{"t", info.t},
           {"symbol_bound", info.symbol_bound},
           {"symbol_refinement_residual", info.symbol_refinement_residual},
           {"series_bound", info.series_bound}};
    if (info.explicit_norm) j["explicit_norm"] = *info.explicit_norm;
    return j;
}

json to_json(const BoundReport& report) {
    return json{{"epsilon", report.epsilon},
                {"delta", report.delta},
                {"c", report.c},
                {"c_includes_k4", report.c_includes_k4},
                {"j_a", report.j_a},
                {"required_lambda_min", report.required_lambda_min},
                {"minimal_t", report.minimal_t},
                {"lambda_min_at_minimal_t", report.lambda_min_at_minimal_t},
                {"rate_bound", report.rate_bound},
                {"lower_bound_lambda_min", report.lower_bound_lambda_min}};
}

BoundReport bound_report_from_json(const json& j) {
    BoundReport r;
    r.epsilon = j.at("epsilon").get<double>();
    r.delta = j.at("delta").get<double>();
    r.c = j.at("c").get<double>();
    r.c_includes_k4 = j.at("c_includes_k4").get<bool>();
    r.j_a = j.at("j_a").get<double>();
    r.required_lambda_min = j.at("required_lambda_min").get<double>();
    r.minimal_t = j.at("minimal_t").get<int>();
    r.lambda_min_at_minimal_t = j.at("lambda_min_at_minimal_t").get<double>();
    r.rate_bound = j.at("rate_bound").get<double>();
    r.lower_bound_lambda_min = j.at("lower_bound_lambda_min").get<double>();
    return r;
}

json to_json(const IsometryReport& report) {
    json singulars = json::array();
    for (Eigen::Index i = 0; i < report.singulars.size(); ++i)
        singulars.push_back(report.singulars(i));
    return json{{"defect", report.defect},
                {"singulars", std::move(singulars)},
                {"epsilon_implied", report.epsilon_implied},
                {"predicted_low", report.predicted_low},
                {"predicted_high", report.predicted_high},
                {"containment", report.containment}};
}

IsometryReport isometry_report_from_json(const json& j) {
    IsometryReport r;
    r.defect = j.at("defect").get<double>();
    const auto& s = j.at("singulars");
    r.singulars.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) r.singulars(i) = s[i].get<double>();
    r.epsilon_implied = j.at("epsilon_implied").get<double>();
    r.predicted_low = j.at("predicted_low").get<double>();
    r.predicted_high = j.at("predicted_high").get<double>();
    r.containment = j.at("containment").get<bool>();
    return r;
}

json to_json(const HwTailReport& report) {
    return json{{"eps", report.eps},
                {"n_trials", report.n_trials},
                {"empirical", report.empirical},
                {"bound", report.bound}};
}

HwTailReport hw_tail_report_from_json(const json& j) {
    HwTailReport r;
    r.eps = j.at("eps").get<double>();
    r.n_trials = j.at("n_trials").get<int>();
    r.empirical = j.at("empirical").get<double>();
    r.bound = j.at("bound").get<double>();
    return r;
}

namespace {

json to_json(const TrialRecord& rec) {
    return json{{"seed", rec.seed},
                {"error", rec.error},
                {"event_e2", rec.event_e2},
                {"selfnorm_value", rec.selfnorm_value},
                {"degenerate", rec.degenerate}};
}

TrialRecord trial_record_from_json(const json& j) {
    TrialRecord r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.error = j.at("error").get<double>();
    r.event_e2 = j.at("event_e2").get<bool>();
    r.selfnorm_value = j.at("selfnorm_value").get<double>();
    r.degenerate = j.at("degenerate").get<bool>();
    return r;
}

}  // namespace

json to_json(const TrialBatch& batch) {
    json trials = json::array();
    for (const TrialRecord& rec : batch.trials) trials.push_back(to_json(rec));
    return json{{"t", batch.t},
                {"epsilon", batch.epsilon},
                {"delta", batch.delta},
                {"trials", std::move(trials)},
                {"failures", batch.failures},
                {"degenerate_count", batch.degenerate_count},
                {"failure_frequency", batch.failure_frequency},
                {"median_error", batch.median_error},
                {"quantile_error", batch.quantile_error},
                {"wilson_low", batch.wilson.low},
                {"wilson_high", batch.wilson.high},
                {"wilson_half_width", batch.wilson.half_width}};
}

TrialBatch trial_batch_from_json(const json& j) {
    TrialBatch b;
    b.t = j.at("t").get<int>();
    b.epsilon = j.at("epsilon").get<double>();
    b.delta = j.at("delta").get<double>();
    for (const auto& rec : j.at("trials")) b.trials.push_back(trial_record_from_json(rec));
    b.failures = j.at("failures").get<long long>();
    b.degenerate_count = j.at("degenerate_count").get<long long>();
    b.failure_frequency = j.at("failure_frequency").get<double>();
    b.median_error = j.at("median_error").get<double>();
    b.quantile_error = j.at("quantile_error").get<double>();
    b.wilson.low = j.at("wilson_low").get<double>();
    b.wilson.high = j.at("wilson_high").get<double>();
    b.wilson.half_width = j.at("wilson_half_width").get<double>();
    return b;
}

json to_json(const DecayFit& fit) {
    json points = json::array();
    for (const DecayPoint& p : fit.points)
        points.push_back(json{{"t", p.t},
                              {"lambda_min", p.lambda_min},
                              {"median_error", p.median_error},
                              {"quantile_error", p.quantile_error},
                              {"implied_constant", p.implied_constant},
                              {"rate_rhs", p.rate_rhs}});
    return json{{"points", std::move(points)},
                {"slope", fit.slope},
                {"c_hat", fit.c_hat},
                {"c_spread", fit.c_spread}};
}

DecayFit decay_fit_from_json(const json& j) {
    DecayFit f;
    for (const auto& pj : j.at("points")) {
        DecayPoint p;
        p.t = pj.at("t").get<int>();
        p.lambda_min = pj.at("lambda_min").get<double>();
        p.median_error = pj.at("median_error").get<double>();
        p.quantile_error = pj.at("quantile_error").get<double>();
        p.implied_constant = pj.at("implied_constant").get<double>();
        p.rate_rhs = pj.at("rate_rhs").get<double>();
        f.points.push_back(p);
    }
    f.slope = j.at("slope").get<double>();
    f.c_hat = j.at("c_hat").get<double>();
    f.c_spread = j.at("c_spread").get<double>();
    return f;
}

json to_json(const ProofDiagnostics& diag) {
    return json{{"epsilon", diag.epsilon},
                {"delta", diag.delta},
                {"k_psi2", diag.k_psi2},
                {"c", diag.c},
                {"lambda_min", diag.lambda_min},
                {"defect", diag.defect},
                {"event_e2", diag.event_e2},
                {"beta", diag.beta},
                {"beta_identity_residual", diag.beta_identity_residual},
                {"selfnorm_value", diag.selfnorm_value},
                {"selfnorm_bound", diag.selfnorm_bound},
                {"selfnorm_threshold", diag.selfnorm_threshold},
                {"selfnorm_ok", diag.selfnorm_ok},
                {"j_a", diag.j_a},
                {"tau1", diag.tau1},
                {"tau2", diag.tau2},
                {"condition12", diag.condition12},
                {"condition13", diag.condition13},
                {"realized_error", diag.realized_error},
                {"chain_bound", diag.chain_bound},
                {"gram_full_rank", diag.gram_full_rank}};
}

ProofDiagnostics proof_diagnostics_from_json(const json& j) {
    ProofDiagnostics d;
    d.epsilon = j.at("epsilon").get<double>();
    d.delta = j.at("delta").get<double>();
    d.k_psi2 = j.at("k_psi2").get<double>();
    d.c = j.at("c").get<double>();
    d.lambda_min = j.at("lambda_min").get<double>();
    d.defect = j.at("defect").get<double>();
    d.event_e2 = j.at("event_e2").get<bool>();
    d.beta = j.at("beta").get<double>();
    d.beta_identity_residual = j.at("beta_identity_residual").get<double>();
    d.selfnorm_value = j.at("selfnorm_value").get<double>();
    d.selfnorm_bound = j.at("selfnorm_bound").get<double>();
    d.selfnorm_threshold = j.at("selfnorm_threshold").get<double>();
    d.selfnorm_ok = j.at("selfnorm_ok").get<bool>();
    d.j_a = j.at("j_a").get<double>();
    d.tau1 = j.at("tau1").get<double>();
    d.tau2 = j.at("tau2").get<double>();
    d.condition12 = j.at("condition12").get<bool>();
    d.condition13 = j.at("condition13").get<bool>();
    d.realized_error = j.at("realized_error").get<double>();
    d.chain_bound = j.at("chain_bound").get<double>();
    d.gram_full_rank = j.at("gram_full_rank").get<bool>();
    return d;
}

json to_json(const CalibrationResult& result) {
    return json{{"c_hat", num_or_null(result.c_hat)},
                {"bracket_lo", num_or_null(result.bracket_lo)},
                {"bracket_hi", num_or_null(result.bracket_hi)},
                {"status", result.status}};
}

CalibrationResult calibration_result_from_json(const json& j) {
    CalibrationResult r;
    r.c_hat = num_from(j.at("c_hat"));
    r.bracket_lo = num_from(j.at("bracket_lo"));
    r.bracket_hi = num_from(j.at("bracket_hi"));
    r.status = j.at("status").get<std::string>();
    return r;
}

namespace {

const char* exec_mode_name(ExecMode mode) {
    return mode == ExecMode::parallel ? "parallel" : "serial";
}

ExecMode exec_mode_from_name(const std::string& name) {
    if (name == "parallel") return ExecMode::parallel;
    if (name == "serial") return ExecMode::serial;
    throw std::invalid_argument("config: exec must be \"parallel\" or \"serial\"");
}

}  // namespace

json to_json(const ExperimentConfig& cfg) {
    return json{{"matrix", matrix_to_json(cfg.a)},
                {"noise", to_string(cfg.noise.kind)},
                {"t_grid", cfg.t_grid},
                {"epsilon", cfg.epsilon},
                {"delta", cfg.delta},
                {"n_trials", cfg.n_trials},
                {"master_seed", cfg.master_seed},
                {"constant_c", cfg.constant_c},
                {"exec", exec_mode_name(cfg.mode)}};
}

ExperimentConfig experiment_config_from_json(const json& j) {
    ExperimentConfig cfg;
    cfg.a = matrix_from_json(j.at("matrix"));
    cfg.noise.kind = noise_kind_from_string(j.at("noise").get<std::string>());
    cfg.t_grid = j.at("t_grid").get<std::vector<int>>();
    cfg.epsilon = j.at("epsilon").get<double>();
    cfg.delta = j.at("delta").get<double>();
    cfg.n_trials = j.at("n_trials").get<int>();
    cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    cfg.constant_c = j.at("constant_c").get<double>();
    if (j.contains("exec")) cfg.mode = exec_mode_from_name(j.at("exec").get<std::string>());
    cfg.validate();
    return cfg;
}

json to_json(const CalibrationConfig& cfg) {
    json family = json::array();
    for (const auto& a : cfg.family) family.push_back(matrix_to_json(a));
    return json{{"family", std::move(family)},
                {"noise", to_string(cfg.noise.kind)},
                {"epsilon", cfg.epsilon},
                {"delta", cfg.delta},
                {"probe_trials", cfg.probe_trials},
                {"t_max", cfg.t_max},
                {"master_seed", cfg.master_seed},
                {"c_lo", cfg.c_lo},
                {"c_hi", cfg.c_hi},
                {"exec", exec_mode_name(cfg.mode)}};
}

CalibrationConfig calibration_config_from_json(const json& j) {
    CalibrationConfig cfg;
    for (const auto& a : j.at("family")) cfg.family.push_back(matrix_from_json(a));
    cfg.noise.kind = noise_kind_from_string(j.at("noise").get<std::string>());
    cfg.epsilon = j.at("epsilon").get<double>();
    cfg.delta = j.at("delta").get<double>();
    cfg.probe_trials = j.at("probe_trials").get<int>();
    cfg.t_max = j.at("t_max").get<int>();
    cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("c_lo")) cfg.c_lo = j.at("c_lo").get<double>();
    if (j.contains("c_hi")) cfg.c_hi = j.at("c_hi").get<double>();
    if (j.contains("exec")) cfg.mode = exec_mode_from_name(j.at("exec").get<std::string>());
    cfg.validate();
    return cfg;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

json to_json(const RunManifest& manifest) {
    return json{{"subcommand", manifest.subcommand},
                {"config", manifest.config},
                {"master_seed", manifest.master_seed},
                {"version", manifest.version},
                {"outputs", manifest.outputs},
                {"duration_seconds", manifest.duration_seconds}};
}

}  // namespace sysid::io
