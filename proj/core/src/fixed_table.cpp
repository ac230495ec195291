#include "decbench/fixed_table.hpp"

#include <cmath>

#include "decbench/errors.hpp"
#include "decbench/strconv.hpp"

namespace decbench {

FixedTableBackend::Builder& FixedTableBackend::Builder::name(std::string value) {
    name_ = std::move(value);
    return *this;
}

FixedTableBackend::Builder& FixedTableBackend::Builder::tokens(std::vector<std::string> value) {
    tokens_ = std::move(value);
    return *this;
}

FixedTableBackend::Builder& FixedTableBackend::Builder::row(const std::vector<std::string>& context,
                                                            std::vector<double> probs) {
    rows_.emplace_back(context, std::move(probs));
    return *this;
}

FixedTableBackend::Builder& FixedTableBackend::Builder::repr_dim(int value) {
    repr_dim_ = value;
    return *this;
}

FixedTableBackend::Builder& FixedTableBackend::Builder::repr_context(int value) {
    repr_context_ = value;
    return *this;
}

std::shared_ptr<FixedTableBackend> FixedTableBackend::Builder::build() {
    return std::shared_ptr<FixedTableBackend>(new FixedTableBackend(std::move(*this)));
}

FixedTableBackend::FixedTableBackend(Builder&& b) : vocab_(std::move(b.tokens_)), repr_context_(b.repr_context_) {
    descriptor_.name = std::move(b.name_);
    descriptor_.kind = BackendKind::fixed_table;
    descriptor_.repr_dim = b.repr_dim_;

    for (auto& [ctx_tokens, probs] : b.rows_) {
        if (static_cast<int>(probs.size()) != vocab_.size()) {
            throw InputError("fixed-table row has " + std::to_string(probs.size()) + " probabilities, vocabulary has " +
                             std::to_string(vocab_.size()));
        }
        TokenDistribution::from_probs(probs);  // validates
        std::vector<int> key;
        key.reserve(ctx_tokens.size());
        for (const auto& t : ctx_tokens) {
            int id = vocab_.find(t);
            if (id < 0) {
                throw InputError("fixed-table context token '" + t + "' not in vocabulary");
            }
            key.push_back(id);
        }
        max_context_ = std::max(max_context_, static_cast<int>(key.size()));
        if (!table_.emplace(std::move(key), std::move(probs)).second) {
            throw InputError("duplicate fixed-table row");
        }
    }
    if (!table_.count(std::vector<int>{})) {
        throw InputError("fixed-table backend '" + descriptor_.name + "' needs an empty-context row");
    }
    descriptor_.params["contexts"] = std::to_string(table_.size());
}

TokenDistribution FixedTableBackend::next_distribution(std::span<const int> context) const {
    check_context(context);
    int longest = std::min(max_context_, static_cast<int>(context.size()));
    for (int len = longest; len >= 0; --len) {
        std::vector<int> key(context.end() - len, context.end());
        auto it = table_.find(key);
        if (it != table_.end()) {
            TokenDistribution dist;
            dist.probs = it->second;
            return dist;
        }
    }
    // Unreachable: the empty-context row always matches.
    throw InputError("fixed-table lookup failed");
}

TokenRepresentation FixedTableBackend::token_representation(std::span<const int> context, int token) const {
    if (!supports_representation()) {
        return LmBackend::token_representation(context, token);
    }
    check_context(context);
    return hashed_representation(vocab_, context, token, descriptor_.repr_dim, repr_context_);
}

}  // namespace decbench
