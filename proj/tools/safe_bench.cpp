// Throughput comparison of the serial reference kernel against the OpenMP
// kernel, one row per effect-size kind. Also asserts that both produce the
// same bits before timing anything.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include <omp.h>

#include "safe/engine.hpp"

namespace {

struct Case {
    const char* name;
    safe::EffectSizeKind kind;
    safe::EffectInputs inputs;
};

double time_best_of(int reps, const std::function<void()>& fn) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const double t0 = omp_get_wtime();
        fn();
        best = std::min(best, omp_get_wtime() - t0);
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    std::uint64_t replicates = 2000000;
    if (argc > 1) replicates = std::strtoull(argv[1], nullptr, 10);
    const int threads = omp_get_max_threads();

    std::vector<Case> cases;
    {
        Case c{"reciprocal", safe::EffectSizeKind::Reciprocal, {}};
        c.inputs.group1 = safe::GroupSummary(10.5, 1.1726039399558579, 5);
        cases.push_back(c);
    }
    {
        Case c{"lnrom", safe::EffectSizeKind::LnRoM, {}};
        c.inputs.group1 = safe::GroupSummary(13.4, 4.6, 18);
        c.inputs.group2 = safe::GroupSummary(16.1, 3.9, 17);
        cases.push_back(c);
    }
    {
        Case c{"smd", safe::EffectSizeKind::Smd, {}};
        c.inputs.group1 = safe::GroupSummary(13.4, 4.6, 18);
        c.inputs.group2 = safe::GroupSummary(16.1, 3.9, 17);
        cases.push_back(c);
    }
    {
        Case c{"lnor", safe::EffectSizeKind::LnOR, {}};
        c.inputs.table = safe::ContingencyTable(2, 20, 10, 12);
        cases.push_back(c);
    }
    {
        Case c{"hwd", safe::EffectSizeKind::Hwd, {}};
        c.inputs.genotypes = safe::GenotypeCounts(40, 25, 50);
        cases.push_back(c);
    }

    std::printf("B = %llu, threads = %d\n", (unsigned long long)replicates, threads);
    std::printf("%-10s %12s %12s %9s %14s\n", "kind", "serial [s]", "openmp [s]",
                "speedup", "Mreplicates/s");

    safe::SafeConfig cfg;
    cfg.replicates = replicates;
    cfg.master_seed = 7;

    for (const Case& c : cases) {
        safe::SamplingModel model;
        switch (c.kind) {
            case safe::EffectSizeKind::Reciprocal:
                model = safe::model_single_mean(*c.inputs.group1);
                break;
            case safe::EffectSizeKind::LnRoM:
                model = safe::model_two_means(*c.inputs.group1, *c.inputs.group2,
                                              std::nullopt, true);
                break;
            case safe::EffectSizeKind::Smd:
                model = safe::model_mean_variance_quartet(
                    *c.inputs.group1, *c.inputs.group2, std::nullopt,
                    safe::VarianceSamplingMode::Gaussian, false);
                break;
            case safe::EffectSizeKind::LnOR:
                model = safe::model_two_binomials(*c.inputs.table);
                break;
            case safe::EffectSizeKind::Hwd:
                model = safe::model_genotypes(*c.inputs.genotypes);
                break;
            default:
                continue;
        }
        const safe::ReplicateProgram prog(model, c.kind, cfg.cc, cfg.truncation,
                                          cfg.max_attempt_factor, c.inputs);
        const safe::RngStream stream{cfg.master_seed, 0};

        const safe::KernelStats serial =
            safe::run_replicates_serial(prog, stream, replicates);
        const safe::KernelStats parallel =
            safe::run_replicates(prog, stream, replicates, threads);
        if (serial.moments.mean != parallel.moments.mean ||
            serial.moments.m2 != parallel.moments.m2 ||
            serial.valid != parallel.valid) {
            std::fprintf(stderr, "kernel mismatch for %s\n", c.name);
            return 1;
        }

        const double ts = time_best_of(3, [&] {
            safe::run_replicates_serial(prog, stream, replicates);
        });
        const double tp = time_best_of(3, [&] {
            safe::run_replicates(prog, stream, replicates, threads);
        });
        std::printf("%-10s %12.4f %12.4f %8.2fx %14.1f\n", c.name, ts, tp, ts / tp,
                    replicates / tp / 1e6);
    }
    return 0;
}
