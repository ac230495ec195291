#include <benchmark/benchmark.h>

#include <random>

#include "decbench/mauve.hpp"
#include "decbench/metrics.hpp"

using namespace decbench;

static void BM_diversity(benchmark::State& state) {
    std::mt19937_64 rng(9);
    std::vector<std::string> tokens;
    for (long i = 0; i < state.range(0); ++i) {
        tokens.push_back("w" + std::to_string(rng() % 50));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(diversity(tokens));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_diversity)->Arg(64)->Arg(256)->Arg(1024);

static void BM_mauve_lite(benchmark::State& state) {
    std::mt19937_64 rng(10);
    auto cloud = [&](size_t n) {
        std::vector<Embedding> out;
        for (size_t i = 0; i < n; ++i) {
            Embedding e(64);
            for (double& v : e) {
                v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            }
            out.push_back(std::move(e));
        }
        return out;
    };
    auto gen = cloud(static_cast<size_t>(state.range(0)));
    auto ref = cloud(static_cast<size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(mauve_lite(gen, ref));
    }
}
BENCHMARK(BM_mauve_lite)->Arg(50)->Arg(200);
