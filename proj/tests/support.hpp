#pragma once

// Shared toy models, oracles and generators for the test suites. Oracles
// here are intentionally naive and independent of the library code paths
// they check.

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "decbench/backend.hpp"
#include "decbench/fixed_table.hpp"
#include "decbench/ngram.hpp"

namespace testsupport {

using namespace decbench;

// The two-token toy: P(A)=0.6; P(A|A)=0.5, P(B|A)=0.5; P(A|B)=0.9.
// Greedy emits AA (joint 0.30); the optimum is BA (joint 0.36).
inline std::shared_ptr<FixedTableBackend> two_token_toy() {
    FixedTableBackend::Builder b;
    b.name("toy2").tokens({"A", "B"});
    b.row({}, {0.6, 0.4});
    b.row({"A"}, {0.5, 0.5});
    b.row({"B"}, {0.9, 0.1});
    return b.build();
}

// Random order-1 Markov table over n_tokens tokens, strictly positive rows.
inline std::shared_ptr<FixedTableBackend> random_markov_backend(std::mt19937_64& rng, int n_tokens,
                                                                const std::string& name = "rand") {
    auto random_row = [&](int n) {
        std::vector<double> probs(static_cast<size_t>(n));
        double sum = 0;
        for (double& p : probs) {
            p = 0.05 + (static_cast<double>(rng() >> 11) * 0x1.0p-53);
            sum += p;
        }
        for (double& p : probs) {
            p /= sum;
        }
        // Normalization within 1e-9 exactly: pin the last entry.
        double partial = 0;
        for (size_t i = 0; i + 1 < probs.size(); ++i) {
            partial += probs[i];
        }
        probs.back() = 1.0 - partial;
        return probs;
    };
    std::vector<std::string> tokens;
    for (int i = 0; i < n_tokens; ++i) {
        tokens.push_back("t" + std::to_string(i));
    }
    FixedTableBackend::Builder b;
    b.name(name).tokens(tokens);
    b.row({}, random_row(n_tokens));
    for (const auto& tok : tokens) {
        b.row({tok}, random_row(n_tokens));
    }
    return b.build();
}

// Delegating backend whose representations are all identical; every
// contrastive penalty ties.
class ConstantRepBackend final : public LmBackend {
  public:
    explicit ConstantRepBackend(std::shared_ptr<const LmBackend> inner) : inner_(std::move(inner)) {
        desc_ = inner_->descriptor();
        desc_.name += "-constrep";
        if (desc_.repr_dim <= 0) {
            desc_.repr_dim = 8;
        }
    }
    const Vocabulary& vocab() const override { return inner_->vocab(); }
    const BackendDescriptor& descriptor() const override { return desc_; }
    TokenDistribution next_distribution(std::span<const int> ctx) const override {
        return inner_->next_distribution(ctx);
    }
    TokenRepresentation token_representation(std::span<const int>, int) const override {
        TokenRepresentation rep;
        rep.values.assign(static_cast<size_t>(desc_.repr_dim), 1.0 / std::sqrt(static_cast<double>(desc_.repr_dim)));
        return rep;
    }

  private:
    std::shared_ptr<const LmBackend> inner_;
    BackendDescriptor desc_;
};

// Exhaustive search over all |V|^len continuations; the beam-search oracle.
inline double exhaustive_best_logprob(const LmBackend& backend, std::span<const int> prompt, int len) {
    int vocab = backend.vocab().size();
    double best = -std::numeric_limits<double>::infinity();
    std::vector<int> seq(static_cast<size_t>(len), 0);
    while (true) {
        std::vector<int> ctx(prompt.begin(), prompt.end());
        double logp = 0;
        for (int i = 0; i < len; ++i) {
            TokenDistribution dist = backend.next_distribution(ctx);
            double p = dist.probs[static_cast<size_t>(seq[static_cast<size_t>(i)])];
            if (p <= 0) {
                logp = -std::numeric_limits<double>::infinity();
                break;
            }
            logp += std::log(p);
            ctx.push_back(seq[static_cast<size_t>(i)]);
        }
        best = std::max(best, logp);
        int d = len;
        while (d > 0) {
            --d;
            if (++seq[static_cast<size_t>(d)] < vocab) {
                break;
            }
            seq[static_cast<size_t>(d)] = 0;
            if (d == 0) {
                return best;
            }
        }
        if (len == 0) {
            return best;
        }
    }
}

// Naive n-gram counting oracle for the diversity metric.
inline double naive_diversity(const std::vector<std::string>& tokens) {
    double value = 1.0;
    for (size_t n = 2; n <= 4; ++n) {
        std::set<std::vector<std::string>> unique;
        size_t total = 0;
        for (size_t i = 0; i + n <= tokens.size(); ++i) {
            unique.insert(std::vector<std::string>(tokens.begin() + static_cast<long>(i),
                                                   tokens.begin() + static_cast<long>(i + n)));
            ++total;
        }
        value *= static_cast<double>(unique.size()) / static_cast<double>(total);
    }
    return value;
}

inline double chi_square_stat(const std::vector<long>& observed, const std::vector<double>& probs, long total) {
    double stat = 0;
    for (size_t i = 0; i < observed.size(); ++i) {
        double expected = probs[i] * static_cast<double>(total);
        if (expected <= 0) {
            continue;
        }
        double d = static_cast<double>(observed[i]) - expected;
        stat += d * d / expected;
    }
    return stat;
}

// Wilson-Hilferty approximation of the chi-square 0.99 quantile.
inline double chi_square_critical_99(int df) {
    double z = 2.3263478740408408;  // Phi^-1(0.99)
    double k = static_cast<double>(df);
    double term = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
    return k * term * term * term;
}

inline std::vector<std::string> random_token_sequence(std::mt19937_64& rng, size_t len, int alphabet) {
    std::vector<std::string> out;
    out.reserve(len);
    for (size_t i = 0; i < len; ++i) {
        out.push_back("w" + std::to_string(rng() % static_cast<uint64_t>(alphabet)));
    }
    return out;
}

}  // namespace testsupport
