#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "gridcascade/assignment.hpp"
#include "gridcascade/cascade.hpp"
#include "gridcascade/experiment.hpp"
#include "gridcascade/network.hpp"
#include "gridcascade/power_flow.hpp"

using namespace gridcascade;

namespace {

PowerNetwork load(const std::string& name) {
    return load_case(std::string(GRIDCASCADE_DATA_DIR) + "/cases/" + name);
}

void BM_Solve(benchmark::State& state, const std::string& name) {
    const auto net = load(name);
    for (auto _ : state) benchmark::DoNotOptimize(solve(net));
}
BENCHMARK_CAPTURE(BM_Solve, case118, std::string("case118.m"))->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Solve, case300, std::string("case300.m"))->Unit(benchmark::kMillisecond);

void BM_CascadeIeee30(benchmark::State& state) {
    const auto net = prepare_ratings(load("case_ieee30.m"));
    const auto mirror = mirror_topology(net);
    const int k = static_cast<int>(state.range(0));
    int run = 0;
    for (auto _ : state) {
        std::mt19937_64 rng(run_seed(1, k, run++));
        const auto attack = sample_attack(rng, k, AttackTarget::buses, net);
        benchmark::DoNotOptimize(run_cascade(net, mirror, attack, {}, {{}, false}));
    }
}
BENCHMARK(BM_CascadeIeee30)->Arg(1)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_Hungarian(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    std::vector<double> cost(static_cast<std::size_t>(n) * n);
    for (auto& c : cost) c = u(rng);
    for (auto _ : state) benchmark::DoNotOptimize(solve_assignment(cost, n));
    state.SetComplexityN(n);
}
BENCHMARK(BM_Hungarian)->RangeMultiplier(2)->Range(8, 256)->Complexity(benchmark::oNCubed);

}  // namespace

BENCHMARK_MAIN();
