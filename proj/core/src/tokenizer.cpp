#include "decbench/tokenizer.hpp"

#include <unordered_set>

#include "decbench/errors.hpp"

namespace decbench {

const char* tokenizer_scheme_name(TokenizerScheme scheme) {
    return scheme == TokenizerScheme::whitespace ? "whitespace" : "byte";
}

TokenizerScheme parse_tokenizer_scheme(std::string_view name) {
    if (name == "whitespace") {
        return TokenizerScheme::whitespace;
    }
    if (name == "byte") {
        return TokenizerScheme::byte;
    }
    throw ConfigError("unknown tokenizer scheme '" + std::string(name) + "' (expected whitespace or byte)");
}

static bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::vector<std::string> Tokenizer::tokenize(std::string_view text) const {
    std::vector<std::string> out;
    if (scheme_ == TokenizerScheme::byte) {
        out.reserve(text.size());
        for (char c : text) {
            out.emplace_back(1, c);
        }
        return out;
    }
    size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) {
            ++i;
        }
        size_t start = i;
        while (i < text.size() && !is_space(text[i])) {
            ++i;
        }
        if (i > start) {
            out.emplace_back(text.substr(start, i - start));
        }
    }
    return out;
}

std::string Tokenizer::detokenize(std::span<const std::string> tokens) const {
    std::string out;
    if (scheme_ == TokenizerScheme::byte) {
        for (const auto& t : tokens) {
            out += t;
        }
        return out;
    }
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) {
            out += ' ';
        }
        out += tokens[i];
    }
    return out;
}

Vocabulary build_vocabulary(std::span<const std::vector<std::string>> sequences, bool add_unknown) {
    std::vector<std::string> tokens;
    std::unordered_set<std::string> seen;
    for (const auto& seq : sequences) {
        for (const auto& tok : seq) {
            if (seen.insert(tok).second) {
                tokens.push_back(tok);
            }
        }
    }
    if (add_unknown && !seen.count(std::string(kUnknownToken))) {
        tokens.emplace_back(kUnknownToken);
    }
    return Vocabulary(std::move(tokens));
}

}  // namespace decbench
