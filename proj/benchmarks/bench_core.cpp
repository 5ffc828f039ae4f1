#include <benchmark/benchmark.h>

#include <cstdio>

#include "dimred/clustering.hpp"
#include "dimred/extension.hpp"
#include "dimred/partitions.hpp"
#include "dimred/projection.hpp"
#include "dimred/random.hpp"

using namespace dimred;

namespace {

std::vector<Vector> points(std::size_t n, std::size_t dim, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Vector> pts(n, Vector(dim));
    for (auto& p : pts)
        for (auto& c : p) c = rng.normal();
    return pts;
}

void BM_SampleGaussian(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sample_gaussian(m, m / 4, seed++));
}
BENCHMARK(BM_SampleGaussian)->Arg(64)->Arg(256);

void BM_SampleSubspace(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sample_subspace(m, m / 4, seed++));
}
BENCHMARK(BM_SampleSubspace)->Arg(64)->Arg(256);

void BM_ProjectionApply(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    const auto map = sample_gaussian(m, m / 4, 1);
    const auto x = points(1, m, 2).front();
    for (auto _ : state) benchmark::DoNotOptimize(map.apply(x));
}
BENCHMARK(BM_ProjectionApply)->Arg(64)->Arg(1024);

void BM_CenterAndCost(benchmark::State& state) {
    const double p = static_cast<double>(state.range(0)) / 2.0;
    const auto pts = points(200, 10, 3);
    for (auto _ : state) benchmark::DoNotOptimize(center_and_cost(pts, {}, p));
    char label[16];
    std::snprintf(label, sizeof label, "p=%g", p);
    state.SetLabel(label);
}
BENCHMARK(BM_CenterAndCost)->Arg(2)->Arg(3)->Arg(4)->Arg(6);

void BM_EnumeratePartitions(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        std::size_t count = 0;
        enumerate_partitions(n, 3, [&](std::span<const std::size_t>) { ++count; });
        benchmark::DoNotOptimize(count);
    }
}
BENCHMARK(BM_EnumeratePartitions)->Arg(8)->Arg(11);

void BM_BruteForceClustering(benchmark::State& state) {
    const auto data = Dataset::from_points(points(static_cast<std::size_t>(state.range(0)), 3, 4));
    for (auto _ : state) benchmark::DoNotOptimize(optimal_clustering_bruteforce(data, 3, 2.0));
}
BENCHMARK(BM_BruteForceClustering)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_MinLambdaOracle(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(5);
    std::vector<double> g(n);
    for (auto& x : g) x = rng.normal();
    const double eta = 4.0 / static_cast<double>(n);
    for (auto _ : state) benchmark::DoNotOptimize(min_lambda_over_box(g, eta));
}
BENCHMARK(BM_MinLambdaOracle)->Arg(100)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
