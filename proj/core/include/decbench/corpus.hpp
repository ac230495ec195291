#pragma once

#include <span>
#include <string>
#include <vector>

#include "decbench/tokenizer.hpp"

namespace decbench {

inline constexpr int kDefaultPrefixLen = 32;

// A prompt paired with its gold continuation.
struct PromptRecord {
    std::string prompt_id;
    std::string dataset_id;
    std::vector<std::string> prompt;
    std::vector<std::string> gold;
};

struct Dataset {
    std::string id;
    std::vector<PromptRecord> records;
    size_t skipped_short = 0;  // rawtext documents too short to split
    double weight() const { return static_cast<double>(records.size()); }
};

enum class DatasetFormat { jsonl, rawtext };

DatasetFormat infer_dataset_format(const std::string& path);  // .jsonl -> jsonl, else rawtext

// jsonl: one {"prompt_id"?, "prompt", "gold"} object per line (missing
// prompt_id becomes p<line-index>). rawtext: blank-line-separated documents,
// each split at prefix_len tokens into (prompt, gold); documents shorter
// than prefix_len+1 tokens are skipped and counted. Errors carry line
// numbers; an empty result set is an error.
Dataset load_dataset(const std::string& path, DatasetFormat format, const Tokenizer& tokenizer,
                     const std::string& dataset_id, int prefix_len = kDefaultPrefixLen);

// In-memory variant used by tests and synthetic corpora.
Dataset load_dataset_text(const std::string& content, DatasetFormat format, const Tokenizer& tokenizer,
                          const std::string& dataset_id, int prefix_len = kDefaultPrefixLen);

// Blank-line-separated documents of a raw UTF-8 corpus file, tokenized.
std::vector<std::vector<std::string>> load_corpus_sequences(const std::string& path, const Tokenizer& tokenizer);

}  // namespace decbench
