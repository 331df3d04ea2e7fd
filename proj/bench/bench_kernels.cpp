// Serial reference vs OpenMP for the three data-parallel kernels.
//
//   soop_bench --benchmark_counters_tabular=true
//
// Set OMP_NUM_THREADS to pick the parallel worker count.

#include <benchmark/benchmark.h>

#include <filesystem>

#include "soop/acquisition.hpp"
#include "soop/campaign_config.hpp"
#include "soop/config.hpp"
#include "soop/mcrlb.hpp"
#include "soop/parallel.hpp"
#include "soop/scenario.hpp"
#include "soop/signal_catalog.hpp"

using namespace soop;

namespace {

Execution mode(const benchmark::State& state) { return state.range(0) == 0 ? Execution::Serial : Execution::Parallel; }

void label(benchmark::State& state) {
    state.SetLabel(state.range(0) == 0 ? "serial" : "parallel x" + std::to_string(thread_count()));
}

void BM_NmsbQuadrature(benchmark::State& state) {
    const OfdmSpec o = OfdmSpec::starlink();
    const SpectrumModel m = ofdm_spectrum(o);
    QuadratureOptions q;
    q.execution = mode(state);
    for (auto _ : state) benchmark::DoNotOptimize(nmsb_numeric(m, o.symbol_period_s, q));
    label(state);
}

void BM_Scenario(benchmark::State& state) {
    static const ScenarioConfig cfg = [] {
        const std::filesystem::path data = std::filesystem::path(SOOP_SOURCE_DIR) / "data";
        const auto doc = config::Document::parse(
            "[scenario]\nstart = 2024-04-19T00:00:00Z\nend = 2024-04-19T03:00:00Z\nstep_s = 60\n"
            "masking_angle_deg = 10\nbeamwidth_deg = 90\nsites = " + (data / "sites.csv").string() +
            "\n[constellation OneWeb]\ntle = " + (data / "tle" / "oneweb.tle").string() + "\n");
        return load_scenario_campaign(doc).base;
    }();
    static const auto constellations = load_constellations(cfg);
    for (auto _ : state) benchmark::DoNotOptimize(run_scenario(cfg, constellations, mode(state)));
    label(state);
}

void BM_AcquisitionMonteCarlo(benchmark::State& state) {
    acq::AcqConfig cfg;
    cfg.cn0_grid_dbhz = {50.0, 70.0, 90.0};
    cfg.trials_per_point = 16;
    for (auto _ : state) benchmark::DoNotOptimize(acq::run_acq_montecarlo(cfg, mode(state)));
    label(state);
}

}  // namespace

BENCHMARK(BM_NmsbQuadrature)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Scenario)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_AcquisitionMonteCarlo)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
