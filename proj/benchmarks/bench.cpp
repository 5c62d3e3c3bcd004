#include <random>

#include <benchmark/benchmark.h>

#include "pmwls/objective.hpp"
#include "pmwls/solver.hpp"
#include "pmwls/tuning.hpp"
#include "pmwls/weights.hpp"

using namespace pmwls;

namespace {

Dataset logistic_data(Index n, Index d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    RowMatrix x(n, d);
    Vector theta = Vector::Zero(d), y(n);
    theta(0) = 1.5;
    if (d > 1) theta(1) = -1.0;
    for (Index t = 0; t < n; ++t) {
        for (Index k = 0; k < d; ++k) x(t, k) = g(rng);
        y(t) = 1.0 / (1.0 + std::exp(-x.row(t).dot(theta))) + 0.1 + 0.3 * g(rng);
    }
    return make_dataset(y, x);
}

void BM_SN(benchmark::State& state) {
    const Index n = state.range(0);
    Dataset data = logistic_data(n, 20, 1);
    ObjectiveContext ctx(data, logistic_model(20), build_weight(WeightSpec::ar1(0.5, n)), Penalty::none());
    Vector theta = Vector::Constant(20, 0.1);
    for (auto _ : state) benchmark::DoNotOptimize(s_n(ctx, theta));
}
BENCHMARK(BM_SN)->Arg(50)->Arg(200)->Arg(1000);

void BM_Prox(benchmark::State& state) {
    Penalty pen = Penalty::scad(0.3);
    double z = -2.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(prox_scalar(pen, z, 4.0, 50.0));
        z = z > 2.0 ? -2.0 : z + 0.01;
    }
}
BENCHMARK(BM_Prox);

void BM_BuildWeight(benchmark::State& state) {
    const Index n = state.range(0);
    for (auto _ : state) benchmark::DoNotOptimize(build_weight(WeightSpec::arma11(0.8, 0.4, n)));
}
BENCHMARK(BM_BuildWeight)->Arg(50)->Arg(200)->Arg(1000);

void BM_FitPmwls(benchmark::State& state) {
    const Index n = state.range(0);
    Dataset data = logistic_data(n, 20, 2);
    ObjectiveContext ctx(data, logistic_model(20), build_weight(WeightSpec::ar1(0.5, n)), Penalty::scad(0.05));
    for (auto _ : state) benchmark::DoNotOptimize(fit_pmwls(ctx));
}
BENCHMARK(BM_FitPmwls)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_SelectTau(benchmark::State& state) {
    const Index n = state.range(0);
    Dataset data = logistic_data(n, 20, 3);
    ObjectiveContext ctx(data, logistic_model(20), build_weight(WeightSpec::identity(n)), Penalty::scad(0));
    SolverConfig cfg;
    cfg.bounds = Bounds{Vector::Constant(20, -5.0), Vector::Constant(20, 5.0)};
    for (auto _ : state) benchmark::DoNotOptimize(select_tau(ctx, cfg));
}
BENCHMARK(BM_SelectTau)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
