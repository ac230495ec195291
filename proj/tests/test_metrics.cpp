#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "decbench/errors.hpp"
#include "decbench/metrics.hpp"
#include "support.hpp"

using namespace decbench;
using namespace testsupport;

TEST_CASE("diversity matches hand-computed n-gram ratios") {
    std::vector<std::string> unique_tokens{"a", "b", "c", "d", "e", "f"};
    CHECK(diversity(unique_tokens).value == doctest::Approx(1.0).epsilon(1e-15));

    std::vector<std::string> abab{"a", "b", "a", "b", "a", "b"};
    auto r = diversity(abab);
    CHECK_FALSE(r.degenerate);
    CHECK(r.value == doctest::Approx(2.0 / 15.0).epsilon(1e-12));

    std::vector<std::string> xxxxx{"x", "x", "x", "x", "x"};
    CHECK(diversity(xxxxx).value == doctest::Approx(1.0 / 24.0).epsilon(1e-12));
}

TEST_CASE("too-short continuations are flagged, not errors") {
    std::vector<std::string> four{"a", "b", "c", "d"};
    auto r = diversity(four);
    CHECK(r.degenerate);
    CHECK(r.value == 0.0);
}

TEST_CASE("diversity equals the naive counting oracle on random sequences") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 1000; ++trial) {
        size_t len = 5 + rng() % 120;
        int alphabet = 1 + static_cast<int>(rng() % 8);
        auto seq = random_token_sequence(rng, len, alphabet);
        CHECK(diversity(seq).value == naive_diversity(seq));
    }
}

TEST_CASE("diversity is invariant under alphabet relabeling") {
    std::mt19937_64 rng(103);
    for (int trial = 0; trial < 200; ++trial) {
        auto seq = random_token_sequence(rng, 6 + rng() % 60, 5);
        std::map<std::string, std::string> relabel;
        std::vector<std::string> renamed;
        for (const auto& t : seq) {
            if (!relabel.count(t)) {
                relabel[t] = "Z" + std::to_string(relabel.size() * 7 + 3);
            }
            renamed.push_back(relabel[t]);
        }
        CHECK(diversity(seq).value == diversity(renamed).value);
    }
}

TEST_CASE("coherence is the mean conditional log-likelihood") {
    FixedTableBackend::Builder b;
    b.name("half").tokens({"A", "B"}).row({}, {0.5, 0.5});
    auto half = b.build();
    std::vector<std::string> prefix{"A"};
    std::vector<std::string> cont{"A", "B", "A"};
    CHECK(coherence_raw(*half, prefix, cont) == doctest::Approx(std::log(0.5)).epsilon(1e-12));

    auto toy = two_token_toy();
    std::vector<std::string> none;
    std::vector<std::string> aa{"A", "A"};
    CHECK(coherence_raw(*toy, none, aa) ==
          doctest::Approx((std::log(0.6) + std::log(0.5)) / 2.0).epsilon(1e-12));

    // Consistency with sequence_logprob.
    std::vector<int> ids{0, 0};
    std::vector<int> empty;
    CHECK(coherence_raw(*toy, none, aa) == sequence_logprob(*toy, empty, ids) / 2.0);

    CHECK_THROWS_AS(coherence_raw(*toy, none, none), InputError);
}

TEST_CASE("zero-probability steps surface as -inf") {
    FixedTableBackend::Builder b;
    b.name("onehot").tokens({"A", "B"}).row({}, {1.0, 0.0});
    auto backend = b.build();
    std::vector<std::string> none;
    std::vector<std::string> bb{"B"};
    CHECK(std::isinf(coherence_raw(*backend, none, bb)));
}

TEST_CASE("smoothed min-max normalization on the pool {-5,-3,-1}") {
    NormalizationPool pool;
    pool.add(-5);
    pool.add(-3);
    pool.add(-1);
    pool.finalize("unit");
    CHECK(pool.normalize(-5.0) == 0.2);
    CHECK(pool.normalize(-3.0) == 0.6);
    CHECK(pool.normalize(-1.0) == 1.0);
    CHECK_THROWS_AS(pool.normalize(-5.5), RangeError);
    CHECK_THROWS_AS(pool.normalize(0.0), RangeError);
}

TEST_CASE("normalization is strictly increasing and tops out at 1") {
    std::mt19937_64 rng(107);
    for (int trial = 0; trial < 10000; ++trial) {
        NormalizationPool pool;
        double lo = -20.0 + 10.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
        double hi = lo + 0.5 + 10.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
        pool.add(lo);
        pool.add(hi);
        pool.finalize("fuzz");
        double v1 = lo + (hi - lo) * 0.25;
        double v2 = lo + (hi - lo) * 0.75;
        CHECK(pool.normalize(v1) < pool.normalize(v2));
        CHECK(pool.normalize(hi) == 1.0);
        CHECK(pool.normalize(lo) > 0.0);
    }
}

TEST_CASE("pool bookkeeping") {
    NormalizationPool pool;
    CHECK_THROWS_AS(pool.normalize(0.0), RangeError);
    pool.add(-std::numeric_limits<double>::infinity());
    CHECK(pool.skipped() == 1);
    CHECK_THROWS_AS(pool.finalize("empty"), RangeError);
    pool.add(-2.0);
    pool.finalize("scoped");
    CHECK(pool.scope_id() == "scoped");
    CHECK(pool.normalize(-2.0) == 1.0);
}

TEST_CASE("qtext is the harmonic mean with a zero convention") {
    CHECK(qtext(0.5, 0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(qtext(0.3, 0.9, 0.0) == 0.0);
    CHECK(qtext(0.0, 0.2, 0.4) == 0.0);
    CHECK(qtext(0.8, 0.9, 0.6) == doctest::Approx(3.0 / (1.0 / 0.8 + 1.0 / 0.9 + 1.0 / 0.6)).epsilon(1e-12));
    CHECK(qtext(0.8, 0.9, 0.6) == doctest::Approx(0.7448).epsilon(1e-4));
    CHECK_THROWS_AS(qtext(1.2, 0.5, 0.5), InputError);
    CHECK_THROWS_AS(qtext(0.5, -0.1, 0.5), InputError);
}

TEST_CASE("qtext stays within its component bounds and is symmetric") {
    std::mt19937_64 rng(109);
    for (int trial = 0; trial < 10000; ++trial) {
        double a = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        double b = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        double c = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        double q = qtext(a, b, c);
        double lo = std::min({a, b, c});
        double hi = std::max({a, b, c});
        CHECK(q >= lo - 1e-12);
        CHECK(q <= hi + 1e-12);
        CHECK(q == qtext(c, a, b));
        CHECK(q == qtext(b, c, a));
    }
}

TEST_CASE("metric reports serialize to the fixed CSV header") {
    MetricReport r;
    r.experiment_key = "b|d|greedy|0";
    r.div = 0.5;
    r.coherence_raw = -0.75;
    r.coh = 0.9;
    r.mauve = 0.25;
    r.qtext = 0.45;
    r.n_generations = 3;
    CHECK(std::string(kMetricCsvHeader) == "experiment_key,div,coherence_raw,coh,mauve,qtext,n_generations");
    CHECK(metric_report_csv_row(r) == "b|d|greedy|0,0.5,-0.75,0.9,0.25,0.45,3");
    CHECK(metric_report_jsonl(r).find("\"experiment_key\"") == 1);
}
