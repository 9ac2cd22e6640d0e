#include <cmath>

#include <benchmark/benchmark.h>

#include "levylab/integrator.hpp"
#include "levylab/levy_noise.hpp"
#include "levylab/operators.hpp"

using namespace levylab;

namespace {

DriftOperator op_for(int kind) { return kind == 0 ? DriftOperator::p_laplace(1.5) : DriftOperator::fast_diffusion(0.5); }

const char* label(int kind) { return kind == 0 ? "p_laplace" : "fast_diffusion"; }

}  // namespace

static void BM_ApplyDrift(benchmark::State& state) {
    const auto op = op_for(static_cast<int>(state.range(0)));
    const auto n = static_cast<std::size_t>(state.range(1));
    Engine eng = RngStream{1, 0}.engine();
    const GridFunction u = random_probe(n, 1.0, 1.0, eng);
    for (auto _ : state) benchmark::DoNotOptimize(apply_drift(op, u));
    state.SetLabel(label(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_ApplyDrift)->ArgsProduct({{0, 1}, {8, 32, 128}});

static void BM_ImplicitStep(benchmark::State& state) {
    const auto op = op_for(static_cast<int>(state.range(0)));
    const auto n = static_cast<std::size_t>(state.range(1));
    Engine eng = RngStream{2, 0}.engine();
    const GridFunction u = random_probe(n, 1.0, 1.0, eng);
    GridFunction out;
    std::size_t iterations = 0;
    for (auto _ : state) {
        implicit_step(op, u, 1e-2, nullptr, out, &iterations);
        benchmark::DoNotOptimize(out);
    }
    state.counters["newton"] = static_cast<double>(iterations);
    state.SetLabel(label(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_ImplicitStep)->ArgsProduct({{0, 1}, {8, 32, 128}});

static void BM_SampleSchedule(benchmark::State& state) {
    const auto noise = LevyNoiseModel::cylindrical_stable({0.1, 0.05, 0.1 / 3, 0.025}, 1.5, 32, HSpace::L2,
                                                          std::pow(10.0, -static_cast<double>(state.range(0))));
    std::uint64_t k = 0;
    std::size_t events = 0;
    for (auto _ : state) {
        const auto s = noise.sample_schedule({noise.inner_cutoff(), kInfinity}, 10.0, RngStream{3, k++});
        events += s.size();
    }
    state.counters["events/path"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_SampleSchedule)->DenseRange(1, 3);

static void BM_EvolveFull(benchmark::State& state) {
    const auto op = op_for(static_cast<int>(state.range(0)));
    const NormSuite ns = NormSuite::for_operator(op);
    const auto noise = LevyNoiseModel::cylindrical_stable({0.1, 0.05, 0.1 / 3, 0.025}, 1.5, 32, ns.h, 1e-2);
    SimConfig cfg;
    cfg.horizon = 5.0;
    cfg.store_states = false;
    const GridFunction x = basis_vector(ns.h, 32, 1);
    std::uint64_t k = 0;
    for (auto _ : state) {
        cfg.rng = {4, k++};
        benchmark::DoNotOptimize(evolve_full(x, op, ns, noise, cfg).terminal);
    }
    state.SetLabel(label(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_EvolveFull)->DenseRange(0, 1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
