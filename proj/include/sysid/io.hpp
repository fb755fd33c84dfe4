#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "sysid/estimator.hpp"
#include "sysid/experiments.hpp"
#include "sysid/gramian.hpp"
#include "sysid/lti.hpp"
#include "sysid/spectrum.hpp"

namespace sysid::io {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Matrices travel as a JSON array of rows of finite doubles. Parsing
// rejects ragged or non-finite input with a message naming the entry.
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

// CLI matrix arguments: inline JSON when the string starts with '[',
// otherwise a path to a JSON file.
Eigen::MatrixXd parse_matrix_arg(const std::string& arg);

nlohmann::json to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const nlohmann::json& j);

nlohmann::json to_json(const OlsEstimate& est);
OlsEstimate ols_estimate_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GramianSummary& gs);
nlohmann::json to_json(const ToeplitzInfo& info);

nlohmann::json to_json(const BoundReport& report);
BoundReport bound_report_from_json(const nlohmann::json& j);

nlohmann::json to_json(const IsometryReport& report);
IsometryReport isometry_report_from_json(const nlohmann::json& j);

nlohmann::json to_json(const HwTailReport& report);
HwTailReport hw_tail_report_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TrialBatch& batch);
TrialBatch trial_batch_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DecayFit& fit);
DecayFit decay_fit_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ProofDiagnostics& diag);
ProofDiagnostics proof_diagnostics_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CalibrationResult& result);
CalibrationResult calibration_result_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CalibrationConfig& cfg);
CalibrationConfig calibration_config_from_json(const nlohmann::json& j);

// Shortest decimal representation that parses back to the exact double;
// used for every numeric CSV field.
std::string format_double(double v);

// Write-then-rename so readers never observe a partial file.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

struct RunManifest {
    std::string subcommand;
    nlohmann::json config;
    std::uint64_t master_seed = 0;
    std::string version = kArtifactVersion;
    std::vector<std::string> outputs;
    double duration_seconds = 0.0;
};

nlohmann::json to_json(const RunManifest& manifest);

}  // namespace sysid::io
