#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "decbench/vocab.hpp"

namespace decbench {

enum class TokenizerScheme { whitespace, byte };

const char* tokenizer_scheme_name(TokenizerScheme scheme);
TokenizerScheme parse_tokenizer_scheme(std::string_view name);  // throws ConfigError

// Reversible tokenizer. Byte scheme round-trips any string exactly; the
// whitespace scheme round-trips modulo collapsed whitespace runs
// (detokenize joins with single spaces).
class Tokenizer {
  public:
    explicit Tokenizer(TokenizerScheme scheme = TokenizerScheme::whitespace) : scheme_(scheme) {}

    TokenizerScheme scheme() const { return scheme_; }
    std::vector<std::string> tokenize(std::string_view text) const;
    std::string detokenize(std::span<const std::string> tokens) const;

  private:
    TokenizerScheme scheme_;
};

// Distinct tokens of a corpus in first-appearance order, optionally with the
// reserved unknown token appended.
Vocabulary build_vocabulary(std::span<const std::vector<std::string>> sequences, bool add_unknown);

}  // namespace decbench
