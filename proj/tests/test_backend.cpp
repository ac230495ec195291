#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <random>

#include "decbench/errors.hpp"
#include "decbench/fixed_table.hpp"
#include "decbench/ngram.hpp"
#include "decbench/registry.hpp"
#include "support.hpp"

using namespace decbench;
using namespace testsupport;

TEST_CASE("fixed table echoes its rows") {
    FixedTableBackend::Builder b;
    b.name("echo").tokens({"A", "B"}).row({}, {0.6, 0.4});
    auto backend = b.build();
    auto dist = backend->next_distribution({});
    CHECK(dist.probs[0] == 0.6);
    CHECK(dist.probs[1] == 0.4);
    dist.validate();
}

TEST_CASE("fixed table longest-suffix lookup") {
    auto toy = two_token_toy();
    std::vector<int> ctx{0};  // A
    CHECK(toy->next_distribution(ctx).probs[0] == 0.5);
    ctx = {1};  // B
    CHECK(toy->next_distribution(ctx).probs[0] == 0.9);
    ctx = {1, 0};  // ...A: suffix match on [A]
    CHECK(toy->next_distribution(ctx).probs[0] == 0.5);
}

TEST_CASE("fixed table requires the empty-context row and valid rows") {
    FixedTableBackend::Builder missing;
    missing.name("bad").tokens({"A", "B"}).row({"A"}, {0.5, 0.5});
    CHECK_THROWS_AS(missing.build(), InputError);

    FixedTableBackend::Builder badsum;
    badsum.name("bad").tokens({"A", "B"}).row({}, {0.6, 0.6});
    CHECK_THROWS_AS(badsum.build(), InputError);
}

TEST_CASE("unknown token index is an input error") {
    auto toy = two_token_toy();
    std::vector<int> ctx{7};
    CHECK_THROWS_AS(toy->next_distribution(ctx), InputError);
}

TEST_CASE("ngram MLE dominance under additive smoothing") {
    std::vector<std::vector<std::string>> corpus = {{"a", "a", "a", "a"}};
    auto lm = train_ngram_backend(corpus, 2, 0.5, "aa");
    std::vector<int> ctx{lm->vocab().find("a")};
    auto dist = lm->next_distribution(ctx);
    REQUIRE(lm->vocab().unk_id().has_value());
    CHECK(dist.probs[static_cast<size_t>(lm->vocab().find("a"))] >
          dist.probs[static_cast<size_t>(*lm->vocab().unk_id())]);
}

TEST_CASE("ngram additive smoothing formula on corpus 'a b'") {
    for (double delta : {0.1, 0.5, 1.0, 3.0}) {
        std::vector<std::vector<std::string>> corpus = {{"a", "b"}};
        auto lm = train_ngram_backend(corpus, 2, delta, "ab");
        REQUIRE(lm->vocab().size() == 3);  // a, b, <unk>
        std::vector<int> ctx{lm->vocab().find("a")};
        auto dist = lm->next_distribution(ctx);
        double expected = (1.0 + delta) / (1.0 + 3.0 * delta);
        CHECK(dist.probs[static_cast<size_t>(lm->vocab().find("b"))] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("unigram counts on corpus 'a b a'") {
    double delta = 0.5;
    std::vector<std::vector<std::string>> corpus = {{"a", "b", "a"}};
    auto lm = train_ngram_backend(corpus, 1, delta, "aba");
    auto dist = lm->next_distribution({});
    double denom = 3.0 + 3.0 * delta;
    CHECK(dist.probs[static_cast<size_t>(lm->vocab().find("a"))] == doctest::Approx((2.0 + delta) / denom));
    CHECK(dist.probs[static_cast<size_t>(lm->vocab().find("b"))] == doctest::Approx((1.0 + delta) / denom));
    CHECK(dist.probs[static_cast<size_t>(*lm->vocab().unk_id())] == doctest::Approx(delta / denom));
}

TEST_CASE("unseen context backs off to the next-lower order") {
    std::vector<std::vector<std::string>> corpus = {{"a", "b", "a"}};
    auto lm = train_ngram_backend(corpus, 2, 0.5, "backoff");
    // Context <unk> was never observed at order 2; equals the unigram row.
    std::vector<int> unseen{*lm->vocab().unk_id()};
    auto fell_back = lm->next_distribution(unseen);
    auto unigram = lm->next_distribution({});
    REQUIRE(fell_back.probs.size() == unigram.probs.size());
    for (size_t i = 0; i < unigram.probs.size(); ++i) {
        CHECK(fell_back.probs[i] == unigram.probs[i]);
    }
}

TEST_CASE("huge smoothing tends to uniform") {
    std::vector<std::vector<std::string>> corpus = {{"a", "b", "a", "a"}};
    auto lm = train_ngram_backend(corpus, 1, 1e9, "uniformish");
    auto dist = lm->next_distribution({});
    for (double p : dist.probs) {
        CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
    }
}

TEST_CASE("training rejects bad inputs") {
    std::vector<std::vector<std::string>> empty;
    CHECK_THROWS_AS(train_ngram_backend(empty, 2, 0.5, "x"), InputError);
    std::vector<std::vector<std::string>> corpus = {{"a", "b"}};
    CHECK_THROWS_AS(train_ngram_backend(corpus, 0, 0.5, "x"), InputError);
    CHECK_THROWS_AS(train_ngram_backend(corpus, 2, 0.0, "x"), InputError);
}

TEST_CASE("distributions sum to one over fuzzed contexts") {
    std::mt19937_64 rng(17);
    std::vector<std::vector<std::string>> corpus;
    for (int i = 0; i < 20; ++i) {
        corpus.push_back(random_token_sequence(rng, 30 + rng() % 50, 12));
    }
    auto lm = train_ngram_backend(corpus, 3, 0.25, "fuzz");
    auto markov = random_markov_backend(rng, 5);
    for (int i = 0; i < 10000; ++i) {
        std::vector<int> ctx;
        size_t len = rng() % 6;
        for (size_t j = 0; j < len; ++j) {
            ctx.push_back(static_cast<int>(rng() % static_cast<uint64_t>(lm->vocab().size())));
        }
        auto dist = lm->next_distribution(ctx);
        dist.validate(1e-9);
        for (double p : dist.probs) {
            CHECK(p > 0);  // additive smoothing: full support
        }
        std::vector<int> mctx;
        for (size_t j = 0; j < len; ++j) {
            mctx.push_back(static_cast<int>(rng() % 5));
        }
        markov->next_distribution(mctx).validate(1e-9);
    }
}

TEST_CASE("backends are deterministic bit for bit") {
    std::mt19937_64 rng(23);
    auto markov = random_markov_backend(rng, 4);
    std::vector<int> ctx{2, 1, 3};
    auto a = markov->next_distribution(ctx);
    auto b = markov->next_distribution(ctx);
    REQUIRE(a.probs.size() == b.probs.size());
    CHECK(std::memcmp(a.probs.data(), b.probs.data(), a.probs.size() * sizeof(double)) == 0);

    auto r1 = markov->token_representation(ctx, 0);
    auto r2 = markov->token_representation(ctx, 0);
    CHECK(std::memcmp(r1.values.data(), r2.values.data(), r1.values.size() * sizeof(double)) == 0);
}

TEST_CASE("hashed representations behave like similarities") {
    auto toy = two_token_toy();
    std::vector<int> ctx{0, 1};
    auto ra = toy->token_representation(ctx, 0);
    auto rb = toy->token_representation(ctx, 1);
    CHECK(cosine(ra, ra) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cosine(ra, rb) < 1.0);
    CHECK(ra.dim() == kDefaultReprDim);
    double norm = 0;
    for (double v : ra.values) {
        norm += v * v;
    }
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("representation-less backends refuse") {
    FixedTableBackend::Builder b;
    b.name("norepr").tokens({"A", "B"}).row({}, {0.5, 0.5}).repr_dim(0);
    auto backend = b.build();
    CHECK_FALSE(backend->supports_representation());
    std::vector<int> ctx;
    CHECK_THROWS_AS(backend->token_representation(ctx, 0), CapabilityError);
}

TEST_CASE("sequence_logprob follows the chain rule") {
    auto toy = two_token_toy();
    std::vector<int> none;
    std::vector<int> a{0};
    std::vector<int> aa{0, 0};
    CHECK(sequence_logprob(*toy, none, a) == doctest::Approx(std::log(0.6)));
    // log p(AB) = log p(A) + log p(B|A)
    std::vector<int> ab{0, 1};
    CHECK(sequence_logprob(*toy, none, ab) ==
          doctest::Approx(sequence_logprob(*toy, none, a) + std::log(0.5)));
    CHECK(sequence_logprob(*toy, none, aa) == doctest::Approx(std::log(0.3)));
    CHECK_THROWS_AS(sequence_logprob(*toy, none, none), InputError);
}

TEST_CASE("zero-probability step yields -inf") {
    FixedTableBackend::Builder b;
    b.name("zero").tokens({"A", "B"}).row({}, {1.0, 0.0});
    auto backend = b.build();
    std::vector<int> none;
    std::vector<int> bb{1};
    CHECK(std::isinf(sequence_logprob(*backend, none, bb)));
}

TEST_CASE("ngram save/load round-trips distributions") {
    std::mt19937_64 rng(31);
    std::vector<std::vector<std::string>> corpus;
    for (int i = 0; i < 5; ++i) {
        corpus.push_back(random_token_sequence(rng, 40, 9));
    }
    auto lm = train_ngram_backend(corpus, 2, 0.5, "persist");
    auto path = std::filesystem::temp_directory_path() / "decbench_test_ngram.dlm";
    save_ngram_backend(*lm, path.string());
    auto loaded = load_ngram_backend(path.string());
    CHECK(loaded->name() == "persist");
    CHECK(loaded->vocab() == lm->vocab());
    for (int i = 0; i < 200; ++i) {
        std::vector<int> ctx;
        size_t len = rng() % 3;
        for (size_t j = 0; j < len; ++j) {
            ctx.push_back(static_cast<int>(rng() % static_cast<uint64_t>(lm->vocab().size())));
        }
        auto a = lm->next_distribution(ctx);
        auto b = loaded->next_distribution(ctx);
        CHECK(std::memcmp(a.probs.data(), b.probs.data(), a.probs.size() * sizeof(double)) == 0);
    }
    std::filesystem::remove(path);
}

TEST_CASE("backend configs parse both kinds") {
    auto fixed = parse_backend_config(
        "kind fixed-table\n"
        "vocab A B\n"
        "row - 0.6 0.4\n"
        "row A 0.5 0.5\n",
        "cfg-fixed");
    CHECK(fixed->name() == "cfg-fixed");
    CHECK(fixed->next_distribution({}).probs[0] == 0.6);

    CHECK_THROWS_AS(parse_backend_config("kind ngram\n", "x"), ConfigError);
    CHECK_THROWS_AS(parse_backend_config("kind martian\n", "x"), ConfigError);
}
