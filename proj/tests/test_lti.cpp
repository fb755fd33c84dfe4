#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "oracles.hpp"
#include "sysid/linalg.hpp"
#include "sysid/lti.hpp"
#include "sysid/rng.hpp"

using namespace sysid;

TEST_CASE("spectral radius on closed-form cases") {
    CHECK(spectral_radius(Eigen::MatrixXd::Zero(2, 2)) == doctest::Approx(0.0));
    CHECK(spectral_radius(0.9 * Eigen::MatrixXd::Identity(3, 3)) == doctest::Approx(0.9));

    Eigen::MatrixXd nilpotent(2, 2);
    nilpotent << 0, 1, 0, 0;
    CHECK(spectral_radius(nilpotent) == doctest::Approx(0.0));
}

TEST_CASE("spectral radius rejects malformed input") {
    CHECK_THROWS_AS(spectral_radius(Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(spectral_radius(bad), std::invalid_argument);
}

TEST_CASE("spectral radius bounded by operator norm") {
    std::mt19937_64 gen(11);
    for (int i = 0; i < 100; ++i) {
        const int d = 1 + static_cast<int>(gen() % 6);
        const Eigen::MatrixXd a = oracles::random_matrix(gen, d, d);
        CHECK(spectral_radius(a) <= operator_norm(a) + 1e-10);
    }
}

TEST_CASE("psi2 norms match frozen oracle values") {
    // gaussian: (1 - 2/K^2)^{-1/2} = 2  =>  K = sqrt(8/3)
    CHECK(NoiseFamily::psi2_norm(NoiseKind::gaussian) ==
          doctest::Approx(1.6329931618554521).epsilon(1e-12));
    // rademacher: exp(1/K^2) = 2
    CHECK(NoiseFamily::psi2_norm(NoiseKind::rademacher) ==
          doctest::Approx(1.2011224087864498).epsilon(1e-12));
    // uniform: series oracle, frozen 1.338369155430911
    CHECK(NoiseFamily::psi2_norm(NoiseKind::uniform) ==
          doctest::Approx(1.338369155430911).epsilon(1e-9));
    CHECK(NoiseFamily::psi2_norm(NoiseKind::uniform) ==
          doctest::Approx(oracles::uniform_psi2_series()).epsilon(1e-10));
}

TEST_CASE("spec construction enforces stability") {
    CHECK_THROWS_AS(SystemSpec(Eigen::MatrixXd::Identity(2, 2), {}), std::invalid_argument);
    CHECK_THROWS_AS(SystemSpec(1.3 * Eigen::MatrixXd::Identity(1, 1), {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(SystemSpec(Eigen::MatrixXd::Zero(2, 3), {}), std::invalid_argument);
    CHECK_NOTHROW(SystemSpec(0.99 * Eigen::MatrixXd::Identity(2, 2), {}));
}

TEST_CASE("zero dynamics collapse the recursion to the noise draws") {
    const SystemSpec spec(Eigen::MatrixXd::Zero(3, 3), {NoiseKind::gaussian});
    const Trajectory traj = simulate(spec, 20, 99);
    // x_{s+1} = eta_{s+1}: rows 1..t of states equal the noise record.
    CHECK((traj.states.bottomRows(20) - traj.noise_record).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hand recursion with forced noise") {
    Eigen::MatrixXd a(1, 1);
    a << 0.7;
    const SystemSpec spec(a, {NoiseKind::gaussian});
    Eigen::MatrixXd noise(3, 1);
    noise << 1.0, 0.0, 0.0;
    const Trajectory traj = simulate_with_noise(spec, noise);
    REQUIRE(traj.horizon == 2);
    CHECK(traj.states(0, 0) == 1.0);
    CHECK(traj.states(1, 0) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(traj.states(2, 0) == doctest::Approx(0.49).epsilon(1e-15));
}

TEST_CASE("simulate is deterministic in (spec, t, seed)") {
    const SystemSpec spec(0.5 * Eigen::MatrixXd::Identity(2, 2), {NoiseKind::uniform});
    const Trajectory a = simulate(spec, 50, 42);
    const Trajectory b = simulate(spec, 50, 42);
    CHECK(a.states == b.states);
    CHECK(a.noise_record == b.noise_record);
    const Trajectory c = simulate(spec, 50, 43);
    CHECK(a.states != c.states);
    const Trajectory d = simulate(spec, 50, 42, /*stream=*/1);
    CHECK(a.states != d.states);
}

TEST_CASE("the first state is the first noise draw") {
    const SystemSpec spec(0.4 * Eigen::MatrixXd::Identity(3, 3), {NoiseKind::gaussian});
    const Trajectory traj = simulate(spec, 10, 123);
    const Eigen::VectorXd eta1 = draw_noise_vector(spec.noise(), 3, 123, 0, 1);
    CHECK(traj.states.row(0).transpose() == eta1);
}

TEST_CASE("simulate validates the horizon") {
    const SystemSpec spec(Eigen::MatrixXd::Zero(1, 1), {});
    CHECK_THROWS_AS(simulate(spec, 0, 1), std::invalid_argument);
}

TEST_CASE("replay residual is exactly zero on fresh trajectories") {
    std::mt19937_64 gen(7);
    for (int rep = 0; rep < 10; ++rep) {
        const int d = 1 + static_cast<int>(gen() % 4);
        const SystemSpec spec(oracles::random_stable(gen, d), {NoiseKind::gaussian});
        const Trajectory traj = simulate(spec, 100, gen());
        CHECK(traj.replay_residual(spec.dynamics()) == 0.0);
    }
}

TEST_CASE("noise coordinates are zero-mean unit-variance") {
    const int n = 100000;
    for (NoiseKind kind :
         {NoiseKind::gaussian, NoiseKind::rademacher, NoiseKind::uniform}) {
        NoiseFamily family{kind};
        double sum = 0.0, sumsq = 0.0;
        for (int i = 0; i < n; ++i) {
            const Eigen::VectorXd v =
                draw_noise_vector(family, 1, 2024, static_cast<std::uint64_t>(i), 0);
            sum += v(0);
            sumsq += v(0) * v(0);
        }
        const double mean = sum / n;
        const double var = sumsq / n - mean * mean;
        CAPTURE(to_string(kind));
        CHECK(std::abs(mean) < 0.02);
        CHECK(std::abs(var - 1.0) < 0.02);
    }
}

TEST_CASE("counter-based draws are scheduling independent") {
    // Same (seed, stream, step, lane) must give the same value regardless
    // of any other draws made in between.
    const double first = rng::draw_gaussian(5, 17, 3, 4);
    (void)rng::draw_gaussian(5, 17, 3, 5);
    (void)rng::draw_gaussian(99, 0, 0, 0);
    CHECK(rng::draw_gaussian(5, 17, 3, 4) == first);
}

TEST_CASE("spec hash separates systems and noise families") {
    const SystemSpec a(Eigen::MatrixXd::Zero(2, 2), {NoiseKind::gaussian});
    const SystemSpec b(Eigen::MatrixXd::Zero(2, 2), {NoiseKind::uniform});
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
    m(0, 0) = 0.5;
    const SystemSpec c(m, {NoiseKind::gaussian});
    CHECK(a.hash() != b.hash());
    CHECK(a.hash() != c.hash());
    CHECK(a.hash() == SystemSpec(Eigen::MatrixXd::Zero(2, 2), {NoiseKind::gaussian}).hash());
}
