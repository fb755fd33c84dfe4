// Benchmark: OpenMP trial loops against the serial reference they must
// reproduce bit-identically. Run after building:
//   ./build/sysid_bench [trials]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sysid/experiments.hpp"
#include "sysid/io.hpp"
#include "sysid/lti.hpp"
#include "sysid/spectrum.hpp"

using namespace sysid;

namespace {

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct Row {
    const char* name;
    double serial_s;
    double parallel_s;
    bool identical;
};

void print_row(const Row& r) {
    std::printf("%-28s serial %8.3fs  parallel %8.3fs  speedup %5.2fx  identical %s\n",
                r.name, r.serial_s, r.parallel_s, r.serial_s / r.parallel_s,
                r.identical ? "yes" : "NO");
}

Row bench_pac(int n_trials) {
    ExperimentConfig cfg;
    cfg.a = Eigen::MatrixXd(2, 2);
    cfg.a << 0.6, 0.2, -0.2, 0.6;
    cfg.noise = {NoiseKind::gaussian};
    cfg.n_trials = n_trials;
    cfg.master_seed = 12345;

    cfg.mode = ExecMode::serial;
    double t0 = now_seconds();
    const TrialBatch serial = pac_experiment(cfg, 2000);
    double t1 = now_seconds();
    cfg.mode = ExecMode::parallel;
    const TrialBatch parallel = pac_experiment(cfg, 2000);
    double t2 = now_seconds();

    return {"pac_experiment t=2000", t1 - t0, t2 - t1,
            io::to_json(serial).dump() == io::to_json(parallel).dump()};
}

Row bench_hw(int n_trials) {
    Eigen::MatrixXd b = Eigen::MatrixXd::Identity(40, 40);
    const NoiseFamily noise{NoiseKind::gaussian};

    double t0 = now_seconds();
    const HwTailReport serial =
        hw_tail_estimate(b, noise, 0.3, n_trials * 50, 7, 1.0, ExecMode::serial);
    double t1 = now_seconds();
    const HwTailReport parallel =
        hw_tail_estimate(b, noise, 0.3, n_trials * 50, 7, 1.0, ExecMode::parallel);
    double t2 = now_seconds();

    return {"hw_tail_estimate d=40", t1 - t0, t2 - t1,
            serial.empirical == parallel.empirical};
}

Row bench_coverage(int n_trials) {
    ExperimentConfig cfg;
    cfg.a = Eigen::MatrixXd(1, 1);
    cfg.a << 0.8;
    cfg.noise = {NoiseKind::uniform};
    cfg.n_trials = n_trials;
    cfg.master_seed = 4321;

    cfg.mode = ExecMode::serial;
    double t0 = now_seconds();
    const double serial = spectrum_coverage(cfg, 5000, 0.2);
    double t1 = now_seconds();
    cfg.mode = ExecMode::parallel;
    const double parallel = spectrum_coverage(cfg, 5000, 0.2);
    double t2 = now_seconds();

    return {"spectrum_coverage t=5000", t1 - t0, t2 - t1, serial == parallel};
}

}  // namespace

int main(int argc, char** argv) {
    const int n_trials = argc > 1 ? std::atoi(argv[1]) : 400;
#ifdef _OPENMP
    std::printf("OpenMP threads: %d, trials: %d\n", omp_get_max_threads(), n_trials);
#else
    std::printf("built without OpenMP, trials: %d\n", n_trials);
#endif

    bool all_identical = true;
    for (const Row& row : {bench_pac(n_trials), bench_hw(n_trials), bench_coverage(n_trials)}) {
        print_row(row);
        all_identical = all_identical && row.identical;
    }
    if (!all_identical) {
        std::printf("parallel results diverged from the serial reference\n");
        return 1;
    }
    return 0;
}
