#pragma once

#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "decbench/backend.hpp"

namespace decbench {

// Count store for additive-smoothed n-gram models over token ids. Keeps
// counts for every context length 0..order-1 so queries can back off to the
// next-lower order when a context was never observed.
class NgramCounts {
  public:
    NgramCounts(int order, int vocab_size);

    int order() const { return order_; }
    int vocab_size() const { return vocab_size_; }

    void add_sequence(std::span<const int> seq);
    // Counts only the windows ending at `pos`; lets the FSD anti-model grow
    // one token at a time without retraining.
    void add_position(std::span<const int> seq, size_t pos);

    // Additive smoothing with constant `delta` at the longest observed
    // context suffix: p(v|ctx) = (count + delta) / (total + delta * |V|).
    std::vector<double> distribution(std::span<const int> context, double delta) const;

    struct ContextEntry {
        std::unordered_map<int, long> counts;
        long total = 0;
    };

    const ContextEntry* find(std::span<const int> context) const;
    size_t context_count() const;
    template <typename Fn>
    void for_each(Fn&& fn) const {  // fn(context ids, token id, count)
        for (const auto& [key, entry] : contexts_) {
            std::vector<int> ctx = decode_key(key);
            for (const auto& [tok, count] : entry.counts) {
                fn(ctx, tok, count);
            }
        }
    }

    void add_count(std::span<const int> context, int token, long count);

  private:
    static std::string encode_key(std::span<const int> context);
    static std::vector<int> decode_key(const std::string& key);

    int order_;
    int vocab_size_;
    std::unordered_map<std::string, ContextEntry> contexts_;
};

// Additive-smoothed n-gram model with single-step backoff per unseen
// context level. Vocabulary = corpus vocabulary plus the reserved unknown
// token. Immutable once trained.
class NgramBackend final : public LmBackend {
  public:
    NgramBackend(std::string name, Vocabulary vocab, NgramCounts counts, double smoothing,
                 int repr_dim = kDefaultReprDim);

    const Vocabulary& vocab() const override { return vocab_; }
    const BackendDescriptor& descriptor() const override { return descriptor_; }
    TokenDistribution next_distribution(std::span<const int> context) const override;
    TokenRepresentation token_representation(std::span<const int> context, int token) const override;

    int order() const { return counts_.order(); }
    double smoothing() const { return smoothing_; }
    const NgramCounts& counts() const { return counts_; }

  private:
    Vocabulary vocab_;
    BackendDescriptor descriptor_;
    NgramCounts counts_;
    double smoothing_;
};

// Trains on tokenized sequences. order >= 1, smoothing > 0, corpus non-empty.
std::shared_ptr<NgramBackend> train_ngram_backend(std::span<const std::vector<std::string>> corpus, int order,
                                                  double smoothing, const std::string& name,
                                                  int repr_dim = kDefaultReprDim);

// Versioned text serialization for reuse across sweep runs.
void save_ngram_backend(const NgramBackend& backend, const std::string& path);
std::shared_ptr<NgramBackend> load_ngram_backend(const std::string& path);

}  // namespace decbench
