#include "decbench/vocab.hpp"

#include "decbench/errors.hpp"

namespace decbench {

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
    if (tokens_.size() < 2) {
        throw InputError("vocabulary needs at least 2 tokens, got " + std::to_string(tokens_.size()));
    }
    index_.reserve(tokens_.size());
    for (size_t i = 0; i < tokens_.size(); ++i) {
        auto [it, inserted] = index_.emplace(tokens_[i], static_cast<int>(i));
        if (!inserted) {
            throw InputError("duplicate vocabulary token '" + tokens_[i] + "'");
        }
        if (tokens_[i] == kUnknownToken) {
            unk_id_ = static_cast<int>(i);
        } else if (tokens_[i] == kEndOfTextToken) {
            eot_id_ = static_cast<int>(i);
        }
    }
}

const std::string& Vocabulary::token(int id) const {
    check_id(id);
    return tokens_[static_cast<size_t>(id)];
}

int Vocabulary::find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    return it == index_.end() ? -1 : it->second;
}

int Vocabulary::encode_token(std::string_view token) const {
    int id = find(token);
    if (id >= 0) {
        return id;
    }
    if (unk_id_) {
        return *unk_id_;
    }
    throw InputError("token '" + std::string(token) + "' not in vocabulary and no unknown index is reserved");
}

std::vector<int> Vocabulary::encode(std::span<const std::string> tokens) const {
    std::vector<int> ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) {
        ids.push_back(encode_token(t));
    }
    return ids;
}

std::vector<std::string> Vocabulary::decode(std::span<const int> ids) const {
    std::vector<std::string> out;
    out.reserve(ids.size());
    for (int id : ids) {
        out.push_back(token(id));
    }
    return out;
}

void Vocabulary::check_id(int id) const {
    if (id < 0 || id >= size()) {
        throw InputError("token index " + std::to_string(id) + " out of range for vocabulary of size " +
                         std::to_string(size()));
    }
}

}  // namespace decbench
