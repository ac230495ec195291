#include "decbench/backend.hpp"

#include <cmath>
#include <limits>

#include "decbench/errors.hpp"
#include "decbench/hash.hpp"

namespace decbench {

double cosine(const TokenRepresentation& a, const TokenRepresentation& b) {
    if (a.dim() != b.dim() || a.dim() == 0) {
        throw InputError("representation dimension mismatch");
    }
    double dot = 0, na = 0, nb = 0;
    for (int i = 0; i < a.dim(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0 || nb == 0) {
        return 0;
    }
    double c = dot / (std::sqrt(na) * std::sqrt(nb));
    return std::min(1.0, std::max(-1.0, c));
}

const char* backend_kind_name(BackendKind kind) {
    switch (kind) {
        case BackendKind::fixed_table: return "fixed-table";
        case BackendKind::ngram: return "ngram";
        case BackendKind::external: return "external";
    }
    return "?";
}

TokenRepresentation LmBackend::token_representation(std::span<const int>, int) const {
    throw CapabilityError("backend '" + name() + "' does not provide token representations");
}

void LmBackend::check_context(std::span<const int> context) const {
    for (int id : context) {
        vocab().check_id(id);
    }
}

double sequence_logprob(const LmBackend& backend, std::span<const int> prefix, std::span<const int> continuation) {
    if (continuation.empty()) {
        throw InputError("sequence_logprob needs a non-empty continuation");
    }
    std::vector<int> ctx(prefix.begin(), prefix.end());
    ctx.reserve(prefix.size() + continuation.size());
    double total = 0;
    for (int id : continuation) {
        backend.vocab().check_id(id);
        TokenDistribution dist = backend.next_distribution(ctx);
        double lp = dist.logprob(id);
        if (std::isinf(lp)) {
            return -std::numeric_limits<double>::infinity();
        }
        total += lp;
        ctx.push_back(id);
    }
    return total;
}

TokenRepresentation hashed_representation(const Vocabulary& vocab, std::span<const int> context, int token, int dim,
                                          int context_window) {
    vocab.check_id(token);
    TokenRepresentation rep;
    rep.values.assign(static_cast<size_t>(dim), 0.0);

    auto add_feature = [&](const std::string& feature) {
        SplitMix64 rng(fnv1a64(feature));
        for (int d = 0; d < dim; ++d) {
            rep.values[static_cast<size_t>(d)] += rng.next_signed_unit();
        }
    };

    int start = std::max(0, static_cast<int>(context.size()) - context_window);
    for (int j = start; j < static_cast<int>(context.size()); ++j) {
        int distance = static_cast<int>(context.size()) - j;  // 1 = nearest
        add_feature("ctx:" + std::to_string(distance) + ":" + vocab.token(context[static_cast<size_t>(j)]));
    }
    add_feature("tok:" + vocab.token(token));

    double norm = 0;
    for (double v : rep.values) {
        norm += v * v;
    }
    norm = std::sqrt(norm);
    if (norm < 1e-12) {
        rep.values[0] = 1.0;  // unreachable in practice, keeps the invariant
    } else {
        for (double& v : rep.values) {
            v /= norm;
        }
    }
    return rep;
}

}  // namespace decbench
