#include <benchmark/benchmark.h>

#include <random>

#include "decbench/decoding.hpp"
#include "decbench/ngram.hpp"
#include "decbench/tokenizer.hpp"

using namespace decbench;

namespace {

std::shared_ptr<NgramBackend> bench_backend() {
    static std::shared_ptr<NgramBackend> backend = [] {
        std::mt19937_64 rng(12);
        std::vector<std::vector<std::string>> corpus;
        for (int doc = 0; doc < 50; ++doc) {
            std::vector<std::string> tokens;
            for (int t = 0; t < 400; ++t) {
                tokens.push_back("w" + std::to_string(rng() % 200));
            }
            corpus.push_back(std::move(tokens));
        }
        return train_ngram_backend(corpus, 2, 0.5, "bench");
    }();
    return backend;
}

std::vector<int> bench_prompt() {
    return {1, 2, 3, 4, 5, 6, 7, 8};
}

}  // namespace

static void BM_greedy(benchmark::State& state) {
    auto lm = bench_backend();
    auto prompt = bench_prompt();
    int budget = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(greedy_decode(*lm, prompt, budget));
    }
    state.SetItemsProcessed(state.iterations() * budget);
}
BENCHMARK(BM_greedy)->Arg(32)->Arg(128);

static void BM_beam(benchmark::State& state) {
    auto lm = bench_backend();
    auto prompt = bench_prompt();
    int width = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(beam_decode(*lm, prompt, width, 32));
    }
    state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_beam)->Arg(3)->Arg(10);

static void BM_top_p_sampling(benchmark::State& state) {
    auto lm = bench_backend();
    auto prompt = bench_prompt();
    auto cfg = DecodingConfig::make_top_p(0.95);
    uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_decode(*lm, prompt, cfg, ++seed, 32));
    }
    state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_top_p_sampling);

static void BM_contrastive_search(benchmark::State& state) {
    auto lm = bench_backend();
    auto prompt = bench_prompt();
    for (auto _ : state) {
        benchmark::DoNotOptimize(contrastive_search_decode(*lm, prompt, 0.6, static_cast<int>(state.range(0)), 32));
    }
    state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_contrastive_search)->Arg(5)->Arg(10);

static void BM_fsd(benchmark::State& state) {
    auto lm = bench_backend();
    auto prompt = bench_prompt();
    for (auto _ : state) {
        benchmark::DoNotOptimize(fsd_decode(*lm, prompt, 5, 0.5, 32));
    }
    state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_fsd);

BENCHMARK_MAIN();
