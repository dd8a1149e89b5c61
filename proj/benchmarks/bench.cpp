#include <benchmark/benchmark.h>

#include <sklab/asymptotics.hpp>
#include <sklab/mappings.hpp>
#include <sklab/random.hpp>
#include <sklab/simulation.hpp>
#include <sklab/special_functions.hpp>

using namespace sklab;

namespace {

void bm_noise_norm_quantile(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(sf::noise_norm_quantile(0.99, dim, 0.1));
}
BENCHMARK(bm_noise_norm_quantile)->Arg(8)->Arg(64)->Arg(1024)->Arg(8192);

void bm_expansion_prediction(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(asym::expansion_distortion_finite(64, 2.0, 100.0, 0.01));
}
BENCHMARK(bm_expansion_prediction);

void bm_ml_decode(benchmark::State& state) {
    const auto spiral = map::make_spiral_1_2(0.25);
    const SourceSpec source(1, 1.0);
    const double sigma = 0.01;
    const sim::MlDecoder dec(spiral, source, sigma, sim::DecoderConfig{});
    rng::Philox gen(5, 0);
    Vec y(2);
    for (auto _ : state) {
        state.PauseTiming();
        const double x = gen.next_gaussian();
        y = spiral.map(Vec::Constant(1, x));
        y(0) += sigma * gen.next_gaussian();
        y(1) += sigma * gen.next_gaussian();
        state.ResumeTiming();
        benchmark::DoNotOptimize(dec.decode(y));
    }
}
BENCHMARK(bm_ml_decode);

void bm_run_experiment(benchmark::State& state) {
    sim::ExperimentConfig cfg;
    cfg.mapping.kind = map::MappingKind::spiral_1_2;
    cfg.mapping.a = 0.25;
    cfg.source = SourceSpec(1, 1.0);
    cfg.channel = ChannelSpec::from_csnr_db(1.0, 30.0);
    cfg.trials = 2000;
    cfg.seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(sim::run_experiment(cfg));
    state.SetItemsProcessed(state.iterations() * cfg.trials);
}
BENCHMARK(bm_run_experiment)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
