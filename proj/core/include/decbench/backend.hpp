#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "decbench/distribution.hpp"
#include "decbench/vocab.hpp"

namespace decbench {

inline constexpr int kDefaultReprDim = 64;

// Latent representation of a token in context; what the contrastive-search
// degeneration penalty compares.
struct TokenRepresentation {
    std::vector<double> values;

    int dim() const { return static_cast<int>(values.size()); }
};

// Cosine similarity clamped to [-1, 1].
double cosine(const TokenRepresentation& a, const TokenRepresentation& b);

enum class BackendKind { fixed_table, ngram, external };

const char* backend_kind_name(BackendKind kind);

struct BackendDescriptor {
    std::string name;
    BackendKind kind = BackendKind::external;
    int repr_dim = 0;  // 0 = representations unsupported
    std::map<std::string, std::string> params;
};

// A language model: next-token distributions plus (optionally) token
// representations. Immutable after construction and safe to share across
// concurrent decode calls.
class LmBackend {
  public:
    virtual ~LmBackend() = default;

    virtual const Vocabulary& vocab() const = 0;
    virtual const BackendDescriptor& descriptor() const = 0;

    // Deterministic: identical (backend, context) yields identical output.
    // Throws InputError on out-of-range token ids.
    virtual TokenDistribution next_distribution(std::span<const int> context) const = 0;

    virtual bool supports_representation() const { return descriptor().repr_dim > 0; }
    // Throws CapabilityError when unsupported.
    virtual TokenRepresentation token_representation(std::span<const int> context, int token) const;

    const std::string& name() const { return descriptor().name; }

  protected:
    void check_context(std::span<const int> context) const;
};

// Sum of per-step log-probabilities of `continuation` after `prefix`.
// Returns -inf when any step has zero probability.
double sequence_logprob(const LmBackend& backend, std::span<const int> prefix, std::span<const int> continuation);

// Default representation: a deterministic feature hash of the last
// `context_window` context tokens plus the candidate token, expanded into a
// dense `dim`-vector and L2-normalized. Pure function of the token strings.
TokenRepresentation hashed_representation(const Vocabulary& vocab, std::span<const int> context, int token, int dim,
                                          int context_window);

}  // namespace decbench
