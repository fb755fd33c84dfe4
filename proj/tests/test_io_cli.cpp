#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "sysid/estimator.hpp"
#include "sysid/experiments.hpp"
#include "sysid/gramian.hpp"
#include "sysid/io.hpp"
#include "sysid/spectrum.hpp"

using namespace sysid;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("sysid_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run_cli(const TempDir& dir, const std::string& args, std::string* output = nullptr) {
    const fs::path log = dir.path / "cli_output.txt";
    const std::string cmd = std::string(SYSID_CLI_PATH) + " --out " + dir.path.string() +
                            " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    if (output) *output = slurp(log);
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("matrix JSON validation names the offending entry") {
    CHECK_THROWS_WITH_AS(io::matrix_from_json(json::parse("[[1,2],[3]]")),
                         doctest::Contains("row 1"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(io::matrix_from_json(json::parse("[[1,2],[3,null]]")),
                         doctest::Contains("(1,1)"), std::invalid_argument);
    CHECK_THROWS_AS(io::matrix_from_json(json::parse("[]")), std::invalid_argument);
    CHECK_THROWS_AS(io::matrix_from_json(json::parse("42")), std::invalid_argument);
}

TEST_CASE("trajectory JSON round-trips bit-exactly") {
    std::mt19937_64 gen(1);
    const SystemSpec spec(oracles::random_stable(gen, 3), {NoiseKind::gaussian});
    const Trajectory traj = simulate(spec, 40, 12345);

    const json j = io::to_json(traj);
    const Trajectory back = io::trajectory_from_json(j);
    CHECK(back.states == traj.states);
    CHECK(back.noise_record == traj.noise_record);
    CHECK(back.seed == traj.seed);
    CHECK(io::to_json(back) == j);
    // the recursion survives serialization exactly
    CHECK(back.replay_residual(spec.dynamics()) == 0.0);
}

TEST_CASE("report types survive a JSON round trip") {
    std::mt19937_64 gen(2);
    const Eigen::MatrixXd a = oracles::random_stable(gen, 2, 0.3, 0.7);
    const SystemSpec spec(a, {NoiseKind::uniform});
    const Trajectory traj = simulate(spec, 60, 5);

    SUBCASE("ols estimate") {
        const json j = io::to_json(ols(traj, &a));
        CHECK(io::to_json(io::ols_estimate_from_json(j)) == j);
    }
    SUBCASE("bound report") {
        const json j = io::to_json(evaluate_conditions(a, 0.2, 0.1, 1.0, 1.0, 1 << 18));
        CHECK(io::to_json(io::bound_report_from_json(j)) == j);
    }
    SUBCASE("isometry report") {
        const GramianSummary gs = gramian_sum(a, traj.horizon);
        const json j = io::to_json(isometry_defect(traj.covariates(), gs.whitener));
        CHECK(io::to_json(io::isometry_report_from_json(j)) == j);
    }
    SUBCASE("hw tail report") {
        const json j = io::to_json(
            hw_tail_estimate(Eigen::MatrixXd::Identity(4, 4), {NoiseKind::gaussian},
                             0.5, 500, 3));
        CHECK(io::to_json(io::hw_tail_report_from_json(j)) == j);
    }
    SUBCASE("trial batch") {
        ExperimentConfig cfg;
        cfg.a = a;
        cfg.n_trials = 16;
        const json j = io::to_json(pac_experiment(cfg, 30));
        CHECK(io::to_json(io::trial_batch_from_json(j)) == j);
    }
    SUBCASE("decay fit") {
        ExperimentConfig cfg;
        cfg.a = a;
        cfg.n_trials = 20;
        cfg.t_grid = {20, 60, 200};
        const json j = io::to_json(decay_experiment(cfg));
        CHECK(io::to_json(io::decay_fit_from_json(j)) == j);
    }
    SUBCASE("proof diagnostics") {
        const json j = io::to_json(proof_diagnostics(traj, spec, 0.2, 0.1, 1.5, 1.0));
        CHECK(io::to_json(io::proof_diagnostics_from_json(j)) == j);
    }
    SUBCASE("experiment config") {
        ExperimentConfig cfg;
        cfg.a = a;
        cfg.t_grid = {10, 100};
        cfg.master_seed = 0xFEEDFACEULL;
        const json j = io::to_json(cfg);
        CHECK(io::to_json(io::experiment_config_from_json(j)) == j);
    }
    SUBCASE("calibration config") {
        CalibrationConfig cfg;
        cfg.family = {a, Eigen::MatrixXd::Zero(2, 2), 0.5 * a};
        cfg.noise = {NoiseKind::rademacher};
        cfg.probe_trials = 25;
        const json j = io::to_json(cfg);
        CHECK(io::to_json(io::calibration_config_from_json(j)) == j);
    }
    SUBCASE("calibration result with NaN") {
        CalibrationResult r;
        r.c_hat = std::numeric_limits<double>::quiet_NaN();
        r.bracket_lo = 64.0;
        r.bracket_hi = std::numeric_limits<double>::infinity();
        r.status = "infeasible";
        const json j = io::to_json(r);
        const CalibrationResult back = io::calibration_result_from_json(j);
        CHECK(std::isnan(back.c_hat));
        CHECK(io::to_json(back) == j);
    }
}

TEST_CASE("format_double parses back to the exact value") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> unif(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = i % 7 == 0 ? unif(gen) : unif(gen) / 1e9;
        const std::string s = io::format_double(v);
        double back{};
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == v);
    }
    CHECK(io::format_double(0.1) == "0.1");
}

TEST_CASE("atomic write leaves no temp file") {
    TempDir dir;
    const fs::path target = dir.path / "x.json";
    io::write_text_atomic(target, "{}\n");
    CHECK(slurp(target) == "{}\n");
    CHECK_FALSE(fs::exists(dir.path / "x.json.tmp"));
}

TEST_CASE("cli: bounds matches the library on the same arguments") {
    TempDir dir;
    std::string out;
    const int code =
        run_cli(dir, "bounds --matrix [[0.5]] --epsilon 0.1 --delta 0.05 --constant 1",
                &out);
    REQUIRE(code == 0);
    const json j = json::parse(slurp(dir.path / "bounds_bounds.json"));
    Eigen::MatrixXd a(1, 1);
    a << 0.5;
    const BoundReport expect = evaluate_conditions(
        a, 0.1, 0.05, 1.0, NoiseFamily::psi2_norm(NoiseKind::gaussian), 1 << 20);
    CHECK(j.at("minimal_t").get<int>() == expect.minimal_t);
    CHECK(j.at("required_lambda_min").get<double>() == expect.required_lambda_min);
    CHECK(j.contains("toeplitz"));

    const json manifest = json::parse(slurp(dir.path / "bounds_manifest.json"));
    for (const auto& path : manifest.at("outputs"))
        CHECK(fs::exists(path.get<std::string>()));
}

TEST_CASE("cli: simulate then estimate round trip") {
    TempDir dir;
    REQUIRE(run_cli(dir, "simulate --matrix [[0.7]] --t 30 --seed 5") == 0);
    REQUIRE(fs::exists(dir.path / "simulate_trajectory.json"));

    const std::string est_args = "estimate --trajectory " +
                                 (dir.path / "simulate_trajectory.json").string() +
                                 " --true-A [[0.7]]";
    REQUIRE(run_cli(dir, est_args) == 0);
    const json est = json::parse(slurp(dir.path / "estimate_estimate.json"));
    CHECK(est.contains("error_opnorm"));
    CHECK(est.at("gram_rank").get<int>() == 1);

    // same seed reproduces the trajectory byte for byte
    const std::string first = slurp(dir.path / "simulate_trajectory.json");
    REQUIRE(run_cli(dir, "simulate --matrix [[0.7]] --t 30 --seed 5") == 0);
    CHECK(slurp(dir.path / "simulate_trajectory.json") == first);
}

TEST_CASE("cli: default seed lands in the manifest") {
    TempDir dir;
    REQUIRE(run_cli(dir, "simulate --matrix [[0.5]] --t 5") == 0);
    const json manifest = json::parse(slurp(dir.path / "simulate_manifest.json"));
    CHECK(manifest.at("master_seed").get<std::uint64_t>() == 1729);
    CHECK(manifest.at("version").get<std::string>() == io::kArtifactVersion);
    CHECK(manifest.at("duration_seconds").get<double>() >= 0.0);
}

TEST_CASE("cli: validation failures exit with 2 and a named cause") {
    TempDir dir;
    std::string out;
    CHECK(run_cli(dir, "nonsense-subcommand", &out) == 2);

    CHECK(run_cli(dir, "simulate --t 5", &out) == 2);
    CHECK(out.find("--matrix") != std::string::npos);

    CHECK(run_cli(dir, "simulate --matrix [[1,2],[3]] --t 5", &out) == 2);
    CHECK(out.find("row 1") != std::string::npos);

    CHECK(run_cli(dir, "simulate --matrix [[1.2]] --t 5", &out) == 2);  // unstable
    CHECK(out.find("stable") != std::string::npos);
}

TEST_CASE("cli: pac experiment emits batch, csv, and manifest") {
    TempDir dir;
    ExperimentConfig cfg;
    cfg.a = Eigen::MatrixXd::Zero(1, 1);
    cfg.t_grid = {25};
    cfg.n_trials = 32;
    cfg.master_seed = 99;
    const fs::path cfg_path = dir.path / "cfg.json";
    io::write_text_atomic(cfg_path, io::to_json(cfg).dump(2));

    REQUIRE(run_cli(dir, "pac-experiment --config " + cfg_path.string()) == 0);
    const json batch = json::parse(slurp(dir.path / "pac_batch.json"));
    CHECK(batch.at("trials").size() == 32);

    const std::string csv = slurp(dir.path / "pac_trials.csv");
    CHECK(csv.rfind("trial,error,e2_indicator,selfnorm_value\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 33);

    // library equivalence on the same config
    const TrialBatch direct = pac_experiment(cfg, 25);
    CHECK(batch == io::to_json(direct));
}

TEST_CASE("cli: environment variable supplies the output directory") {
    TempDir dir;
    const fs::path env_dir = dir.path / "env_out";
    const std::string cmd = "SYSID_OUTPUT_DIR=" + env_dir.string() + " " +
                            SYSID_CLI_PATH + " simulate --matrix [[0.5]] --t 4 > /dev/null 2>&1";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(fs::exists(env_dir / "simulate_trajectory.json"));
}
