// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exits non-zero on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "decbench/aggregate.hpp"
#include "decbench/decoding.hpp"
#include "decbench/hash.hpp"
#include "decbench/mauve.hpp"
#include "decbench/metrics.hpp"
#include "decbench/ngram.hpp"
#include "decbench/strconv.hpp"
#include "decbench/sweep.hpp"
#include "support.hpp"

using namespace decbench;
using namespace testsupport;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s %2d  %-28s %s\n", ok ? "PASS" : "FAIL", number, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) {
        ++g_failures;
    }
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c);
    return buf;
}

// --- 1: grid fidelity -------------------------------------------------------

void criterion_grid_fidelity() {
    auto start = Clock::now();
    SweepGrid grid;
    for (int i = 0; i < 7; ++i) {
        grid.backends.push_back("model" + std::to_string(i));
    }
    grid.datasets = {"book", "news", "wiki"};
    grid.strategies = reproduction_strategy_axes("model0");
    auto keys = expand_grid(grid);
    std::map<Strategy, int> family;
    for (const auto& key : keys) {
        family[key.config.strategy]++;
    }
    double elapsed = seconds_since(start);
    bool ok = keys.size() == 1242 && family[Strategy::beam] == 126 && family[Strategy::contrastive_search] == 735 &&
              family[Strategy::adaptive_contrastive_search] == 3 && family[Strategy::temperature] == 126 &&
              family[Strategy::top_k] == 147 && family[Strategy::top_p] == 105 && elapsed < 1.0;
    std::ostringstream detail;
    detail << keys.size() << " keys = " << family[Strategy::beam] << "/" << family[Strategy::contrastive_search]
           << "/" << family[Strategy::adaptive_contrastive_search] << "/" << family[Strategy::temperature] << "/"
           << family[Strategy::top_k] << "/" << family[Strategy::top_p] << " in " << fmt("%.3fs", elapsed);
    report(1, "grid-fidelity", ok, detail.str());
}

// --- 2: beam oracle -----------------------------------------------------------

void criterion_beam_oracle() {
    auto start = Clock::now();
    std::mt19937_64 rng(20250201);
    bool ok = true;
    for (int trial = 0; trial < 50; ++trial) {
        int n = 2 + static_cast<int>(rng() % 4);   // |V| in 2..5
        int len = 1 + static_cast<int>(rng() % 4); // horizon in 1..4
        auto backend = random_markov_backend(rng, n, "oracle" + std::to_string(trial));
        std::vector<int> prompt;
        if (rng() % 2 == 0) {
            prompt.push_back(static_cast<int>(rng() % static_cast<uint64_t>(n)));
        }
        int width = 1;
        for (int i = 0; i < len; ++i) {
            width *= n;
        }
        auto rec = beam_decode(*backend, prompt, width, len);
        double joint = std::accumulate(rec.step_logprobs.begin(), rec.step_logprobs.end(), 0.0);
        double best = exhaustive_best_logprob(*backend, prompt, len);
        ok = ok && joint == best;
    }
    double elapsed = seconds_since(start);
    report(2, "beam-oracle", ok && elapsed < 10.0, fmt("50 exhaustive comparisons in %.2fs", elapsed));
}

// --- 3: strategy degeneracies ---------------------------------------------------

void criterion_degeneracies() {
    std::mt19937_64 rng(20250301);
    bool ok = true;
    for (int trial = 0; trial < 5; ++trial) {
        auto backend = random_markov_backend(rng, 4 + static_cast<int>(rng() % 3), "degen" + std::to_string(trial));
        std::vector<int> prompt{static_cast<int>(rng() % 4)};
        auto greedy = greedy_decode(*backend, prompt, 16);

        ok = ok && beam_decode(*backend, prompt, 1, 16).continuation == greedy.continuation;
        for (uint64_t seed = 0; seed < 20; ++seed) {
            ok = ok && sample_decode(*backend, prompt, DecodingConfig::make_top_k(1), seed, 16).continuation ==
                           greedy.continuation;
        }
        ok = ok && contrastive_search_decode(*backend, prompt, 0.0, 5, 16).continuation == greedy.continuation;

        auto k1 = contrastive_search_decode(*backend, prompt, 0.2, 1, 16);
        for (double alpha : {0.4, 0.6, 0.8, 1.0}) {
            ok = ok && contrastive_search_decode(*backend, prompt, alpha, 1, 16).continuation == k1.continuation;
        }
    }
    report(3, "strategy-degeneracies", ok, "beam(1), topk(1) x20 seeds, cs(alpha=0), cs(k=1) across alpha");
}

// --- 4: sampling fidelity --------------------------------------------------------

void criterion_sampling_fidelity() {
    auto start = Clock::now();
    std::mt19937_64 rng(20250401);
    auto backend = random_markov_backend(rng, 8, "chisq");
    std::vector<int> prompt{3};
    auto expected = backend->next_distribution(prompt);
    std::vector<long> counts(8, 0);
    const long draws = 100000;
    auto cfg = DecodingConfig::make_top_p(1.0);
    for (long i = 0; i < draws; ++i) {
        auto rec = sample_decode(*backend, prompt, cfg, 0x9d5e + static_cast<uint64_t>(i), 1);
        counts[static_cast<size_t>(rec.continuation.at(0))]++;
    }
    double stat = chi_square_stat(counts, expected.probs, draws);
    double critical = chi_square_critical_99(7);
    double elapsed = seconds_since(start);
    report(4, "sampling-fidelity", stat < critical && elapsed < 5.0,
           fmt("chi2 %.2f < %.2f (0.01 level) in %.2fs", stat, critical, elapsed));
}

// --- 5: temperature monotonicity ----------------------------------------------------

void criterion_temperature_monotonicity() {
    auto start = Clock::now();
    std::mt19937_64 rng(20250501);
    const std::vector<double> grid{0.1, 0.3, 0.5, 0.7, 0.9, 1.0};
    bool ok = true;
    for (int trial = 0; trial < 100; ++trial) {
        int n = 2 + static_cast<int>(rng() % 14);
        std::vector<double> logits(static_cast<size_t>(n));
        for (double& l : logits) {
            l = (uniform_unit(rng()) - 0.5) * 12.0;
        }
        logits[0] += 0.25;  // guarantees a non-constant vector
        double prev = -1.0;
        for (double t : grid) {
            double h = entropy(apply_temperature(logits, t));
            ok = ok && h > prev;
            prev = h;
        }
    }
    double elapsed = seconds_since(start);
    report(5, "temperature-monotonicity", ok && elapsed < 1.0, fmt("100 logit vectors x 6 grid points, %.3fs", elapsed));
}

// --- 6: diversity oracle ----------------------------------------------------------

void criterion_diversity_oracle() {
    auto start = Clock::now();
    std::mt19937_64 rng(20250601);
    bool ok = true;
    for (int trial = 0; trial < 1000; ++trial) {
        size_t len = 5 + rng() % 508;  // 5..512
        int alphabet = 1 + static_cast<int>(rng() % 12);
        auto seq = random_token_sequence(rng, len, alphabet);
        ok = ok && diversity(seq).value == naive_diversity(seq);
    }
    std::vector<std::string> abab{"a", "b", "a", "b", "a", "b"};
    ok = ok && std::abs(diversity(abab).value - 2.0 / 15.0) <= 1e-12;
    double elapsed = seconds_since(start);
    report(6, "diversity-oracle", ok && elapsed < 5.0, fmt("1000 sequences vs naive counter in %.2fs", elapsed));
}

// --- 7: COH formula ------------------------------------------------------------------

void criterion_coh_formula() {
    NormalizationPool pool;
    pool.add(-5);
    pool.add(-3);
    pool.add(-1);
    pool.finalize("acceptance");
    bool ok = pool.normalize(-5) == 0.2 && pool.normalize(-3) == 0.6 && pool.normalize(-1) == 1.0;

    std::mt19937_64 rng(20250701);
    for (int trial = 0; trial < 10000; ++trial) {
        NormalizationPool p;
        double lo = -30.0 * uniform_unit(rng()) - 0.01;
        double hi = lo + 0.01 + 20.0 * uniform_unit(rng());
        p.add(lo);
        p.add(hi);
        p.add(lo + (hi - lo) * uniform_unit(rng()));
        p.finalize("fuzz");
        double u = uniform_unit(rng());
        double v = u + (1.0 - u) * uniform_unit(rng());
        double x = lo + (hi - lo) * u;
        double y = lo + (hi - lo) * v;
        if (x < y) {
            ok = ok && p.normalize(x) < p.normalize(y);
        }
        ok = ok && p.normalize(hi) == 1.0;
    }
    report(7, "coh-formula", ok, "pool {-5,-3,-1} exact; monotone on 10k fuzzed pools");
}

// --- 8: qtext identities ----------------------------------------------------------------

void criterion_qtext_identities() {
    std::mt19937_64 rng(20250801);
    bool ok = true;
    for (int trial = 0; trial < 100; ++trial) {
        double x = 0.001 + 0.999 * uniform_unit(rng());
        ok = ok && std::abs(qtext(x, x, x) - x) <= 1e-12;
    }
    for (int trial = 0; trial < 10000; ++trial) {
        double a = uniform_unit(rng());
        double b = uniform_unit(rng());
        double c = uniform_unit(rng());
        double q = qtext(a, b, c);
        ok = ok && q >= std::min({a, b, c}) - 1e-12 && q <= std::max({a, b, c}) + 1e-12;
    }
    ok = ok && qtext(0.7, 0.2, 0.0) == 0.0 && qtext(0.0, 1.0, 1.0) == 0.0;
    report(8, "qtext-identities", ok, "fixed point, bounds on 10k triples, zero convention");
}

// --- 9: mauve endpoints ----------------------------------------------------------------

void criterion_mauve_endpoints() {
    auto start = Clock::now();
    std::mt19937_64 rng(20250901);
    auto cloud = [&](size_t n, double center, double radius) {
        std::vector<Embedding> out;
        for (size_t i = 0; i < n; ++i) {
            Embedding e(16, 0.0);
            for (double& v : e) {
                v = center + radius * (uniform_unit(rng()) - 0.5);
            }
            out.push_back(std::move(e));
        }
        return out;
    };
    auto x = cloud(50, 0.0, 2.0);
    double self_score = mauve_lite(x, x);
    bool ok = std::abs(self_score - 1.0) <= 1e-6;

    auto a = cloud(40, 12.0, 0.1);
    auto b = cloud(40, -12.0, 0.1);
    auto pair = quantize_embeddings(a, b, kMauveDefaultBins);
    double separated = frontier_area(pair.p, pair.q, kMauveDefaultScalingC);
    ok = ok && disjoint_support(pair) && separated < 0.1;
    double elapsed = seconds_since(start);
    report(9, "mauve-endpoints", ok && elapsed < 10.0,
           fmt("self %.8f, disjoint clouds %.5f in %.2fs", self_score, separated, elapsed));
}

// --- 10: qualitative trend ---------------------------------------------------------------

// Deterministic English-like filler: templated sentences over fixed pools.
std::string synthesize_corpus(size_t target_tokens, uint64_t seed) {
    static const std::vector<std::string> dets{"the", "a", "that", "every", "some"};
    static const std::vector<std::string> adjs{"old",   "quiet", "bright", "narrow", "green", "heavy",
                                               "early", "warm",  "pale",   "rough",  "clear", "small"};
    static const std::vector<std::string> nouns{"farmer", "river",  "letter", "garden", "window", "harbor",
                                                "teacher", "bridge", "market", "forest", "engine", "valley",
                                                "painter", "street", "cellar", "meadow", "sailor", "lantern"};
    static const std::vector<std::string> verbs{"watched",  "crossed", "repaired", "followed", "painted",
                                                "opened",   "carried", "visited",  "measured", "cleaned",
                                                "borrowed", "studied"};
    static const std::vector<std::string> advs{"slowly", "quietly", "carefully", "together", "again", "alone"};
    std::mt19937_64 rng(seed);
    auto pick = [&](const std::vector<std::string>& pool) { return pool[rng() % pool.size()]; };
    std::string out;
    size_t tokens = 0;
    size_t doc_tokens = 0;
    while (tokens < target_tokens) {
        // det [adj] noun verb det [adj] noun [adv].
        out += pick(dets);
        ++tokens;
        if (rng() % 2 == 0) {
            out += " " + pick(adjs);
            ++tokens;
        }
        out += " " + pick(nouns) + " " + pick(verbs) + " " + pick(dets);
        tokens += 3;
        if (rng() % 3 == 0) {
            out += " " + pick(adjs);
            ++tokens;
        }
        out += " " + pick(nouns);
        ++tokens;
        if (rng() % 4 == 0) {
            out += " " + pick(advs);
            ++tokens;
        }
        out += " .";
        ++tokens;
        doc_tokens += 9;
        if (doc_tokens >= 250) {
            out += "\n\n";
            doc_tokens = 0;
        } else {
            out += " ";
        }
    }
    return out;
}

void criterion_trend() {
    auto start = Clock::now();
    Tokenizer tok(TokenizerScheme::whitespace);
    std::string corpus_text = synthesize_corpus(50000, 20251001);
    std::vector<std::vector<std::string>> sequences;
    {
        std::istringstream docs(corpus_text);
        std::string doc, line;
        while (std::getline(docs, line)) {
            if (line.empty()) {
                if (!doc.empty()) {
                    sequences.push_back(tok.tokenize(doc));
                    doc.clear();
                }
            } else {
                doc += line + " ";
            }
        }
        if (!doc.empty()) {
            sequences.push_back(tok.tokenize(doc));
        }
    }
    auto lm = train_ngram_backend(sequences, 2, 0.5, "trend-lm");
    Dataset dataset = load_dataset_text(corpus_text, DatasetFormat::rawtext, tok, "trend", 32);
    size_t n_prompts = std::min<size_t>(200, dataset.records.size());

    double beam_div = 0, beam_coh = 0, temp_div = 0, temp_coh = 0;
    const int budget = 64;
    for (size_t i = 0; i < n_prompts; ++i) {
        const auto& rec = dataset.records[i];
        std::vector<int> prompt = lm->vocab().encode(rec.prompt);

        auto beam = beam_decode(*lm, prompt, 10, budget);
        auto beam_text = to_text(beam, lm->vocab());
        beam_div += diversity(beam_text.continuation).value;
        beam_coh += coherence_raw(*lm, beam_text.prompt, beam_text.continuation);

        auto temp = sample_decode(*lm, prompt, DecodingConfig::make_temperature(1.0),
                                  fnv1a64(rec.prompt_id) ^ 20251001ull, budget);
        auto temp_text = to_text(temp, lm->vocab());
        temp_div += diversity(temp_text.continuation).value;
        temp_coh += coherence_raw(*lm, temp_text.prompt, temp_text.continuation);
    }
    beam_div /= static_cast<double>(n_prompts);
    beam_coh /= static_cast<double>(n_prompts);
    temp_div /= static_cast<double>(n_prompts);
    temp_coh /= static_cast<double>(n_prompts);
    double elapsed = seconds_since(start);

    bool ok = beam_div < temp_div && beam_coh > temp_coh && elapsed < 120.0;
    std::ostringstream detail;
    detail << n_prompts << " prompts: DIV " << fmt("%.4f < %.4f", beam_div, temp_div) << ", coherence "
           << fmt("%.4f > %.4f", beam_coh, temp_coh) << fmt(" in %.1fs", elapsed);
    report(10, "beam-vs-sampling-trend", ok, detail.str());
}

// --- 11: harness determinism ----------------------------------------------------------------

void criterion_harness_determinism() {
    auto start = Clock::now();
    Tokenizer tok(TokenizerScheme::whitespace);
    std::string corpus_text = synthesize_corpus(6000, 20251101);
    std::vector<std::vector<std::string>> sequences{tok.tokenize(corpus_text)};

    Registry registry;
    registry.add_backend(train_ngram_backend(sequences, 2, 0.5, "mini-lm"));
    registry.add_backend(train_ngram_backend(sequences, 1, 1.0, "mini-amateur"));
    // Same corpus, same first-appearance vocabulary: contrastive decoding
    // sees a shared token space.
    registry.add_dataset(load_dataset_text(corpus_text, DatasetFormat::rawtext, tok, "mini", 16));

    SweepGrid grid;
    grid.backends = {"mini-lm"};
    grid.datasets = {"mini"};
    grid.max_new_tokens = 16;
    grid.run_seed = 77;
    StrategyAxis axis;
    axis.strategy = Strategy::greedy;
    grid.strategies.push_back(axis);
    axis = StrategyAxis{};
    axis.strategy = Strategy::beam;
    axis.values["w"] = {3};
    grid.strategies.push_back(axis);
    axis = StrategyAxis{};
    axis.strategy = Strategy::temperature;
    axis.values["t"] = {0.9};
    grid.strategies.push_back(axis);
    axis = StrategyAxis{};
    axis.strategy = Strategy::top_k;
    axis.values["k"] = {5};
    grid.strategies.push_back(axis);
    axis = StrategyAxis{};
    axis.strategy = Strategy::top_p;
    axis.values["p"] = {0.9};
    grid.strategies.push_back(axis);
    axis = StrategyAxis{};
    axis.strategy = Strategy::typical;
    axis.values["tau"] = {0.9};
    grid.strategies.push_back(axis);
    axis = StrategyAxis{};
    axis.strategy = Strategy::contrastive_search;
    axis.values["alpha"] = {0.6};
    axis.values["k"] = {5};
    grid.strategies.push_back(axis);
    axis = StrategyAxis{};
    axis.strategy = Strategy::adaptive_contrastive_search;
    grid.strategies.push_back(axis);
    axis = StrategyAxis{};
    axis.strategy = Strategy::fsd;
    axis.values["k"] = {5};
    axis.values["beta"] = {0.5};
    grid.strategies.push_back(axis);
    axis = StrategyAxis{};
    axis.strategy = Strategy::contrastive_decoding;
    axis.values["k"] = {5};
    axis.amateur = "mini-amateur";
    grid.strategies.push_back(axis);

    fs::path dir1 = fs::temp_directory_path() / "decbench_acc_w1";
    fs::path dir8 = fs::temp_directory_path() / "decbench_acc_w8";
    fs::remove_all(dir1);
    fs::remove_all(dir8);

    SweepOptions opt1;
    opt1.workers = 1;
    auto out1 = run_sweep(registry, grid, opt1, dir1);
    SweepOptions opt8;
    opt8.workers = 8;
    auto out8 = run_sweep(registry, grid, opt8, dir8);

    bool ok = out1.complete && out8.complete &&
              results_digest((dir1 / "results.csv").string()) == results_digest((dir8 / "results.csv").string()) &&
              file_digest((dir1 / "generations.jsonl").string()) ==
                  file_digest((dir8 / "generations.jsonl").string());
    double elapsed = seconds_since(start);
    ok = ok && elapsed < 120.0;
    std::ostringstream detail;
    detail << out1.plan_size << " cells, digests " << format_u64(results_digest((dir1 / "results.csv").string()))
           << fmt(" (1 vs 8 workers) in %.1fs", elapsed);
    report(11, "harness-determinism", ok, detail.str());
    fs::remove_all(dir1);
    fs::remove_all(dir8);
}

}  // namespace

int main() {
    auto start = Clock::now();
    criterion_grid_fidelity();
    criterion_beam_oracle();
    criterion_degeneracies();
    criterion_sampling_fidelity();
    criterion_temperature_monotonicity();
    criterion_diversity_oracle();
    criterion_coh_formula();
    criterion_qtext_identities();
    criterion_mauve_endpoints();
    criterion_trend();
    criterion_harness_determinism();

    double total = seconds_since(start);
    report(12, "wall-time-budget", total < 300.0, fmt("%.1fs of 300s", total));

    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all 12 criteria passed\n");
    return 0;
}
