#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "decbench/backend.hpp"
#include "decbench/distribution.hpp"

namespace decbench {

enum class Strategy {
    greedy,
    beam,
    temperature,
    top_k,
    top_p,
    typical,
    contrastive_search,
    adaptive_contrastive_search,
    fsd,
    contrastive_decoding,
};

const char* strategy_short_name(Strategy s);  // greedy, beam, temp, topk, topp, typical, cs, acs, fsd, cd
Strategy parse_strategy_name(std::string_view short_name);  // throws ConfigError
bool strategy_is_deterministic(Strategy s);
bool strategy_needs_representation(Strategy s);

inline constexpr int kDefaultMaxNewTokens = 256;
// Candidate pool used by adaptive contrastive search (hyperparameter-free
// in configs; override via the decode call if needed).
inline constexpr int kAcsDefaultCandidates = 5;
inline constexpr int kFsdAntiOrder = 2;
inline constexpr double kFsdAntiSmoothing = 1.0;

// Strategy identifier plus its hyperparameters. Only the fields relevant to
// the strategy may be set; validate() enforces that and the value ranges.
struct DecodingConfig {
    Strategy strategy = Strategy::greedy;
    std::optional<int> w;            // beam width, >= 1
    std::optional<int> k;            // candidate count, >= 1
    std::optional<double> p;         // nucleus mass, (0, 1]
    std::optional<double> t;         // temperature, > 0
    std::optional<double> alpha;     // contrastive penalty weight, [0, 1]
    std::optional<double> tau;       // typical mass, (0, 1]
    std::optional<double> beta;      // FSD contrast weight, >= 0
    std::optional<std::string> amateur;  // amateur backend name (cd only)

    void validate() const;  // throws ConfigError

    // Canonical key, bit-exact for persistence: greedy, beam[w=10],
    // temp[t=0.9], topk[k=50], topp[p=0.95], typical[tau=0.9],
    // cs[alpha=0.6,k=10], acs, fsd[k=5,beta=0.5], cd[k=5,amateur=<name>].
    std::string key() const;
    static DecodingConfig parse_key(std::string_view key);  // throws ConfigError

    bool operator==(const DecodingConfig&) const = default;

    static DecodingConfig make_greedy();
    static DecodingConfig make_beam(int w);
    static DecodingConfig make_temperature(double t);
    static DecodingConfig make_top_k(int k);
    static DecodingConfig make_top_p(double p);
    static DecodingConfig make_typical(double tau);
    static DecodingConfig make_contrastive_search(double alpha, int k);
    static DecodingConfig make_acs();
    static DecodingConfig make_fsd(int k, double beta);
    static DecodingConfig make_contrastive_decoding(int k, std::string amateur);
};

// One decoded continuation with enough provenance to replay it.
struct GenerationRecord {
    std::vector<int> prompt;
    std::vector<int> continuation;
    std::vector<double> step_logprobs;  // log p under the generating model
    std::vector<double> alpha_trace;    // per-step alpha, ACS only
    DecodingConfig config;
    uint64_t seed = 0;
    std::string backend_name;
    std::string dataset_id;
    std::string prompt_id;
};

// --- distribution transforms -------------------------------------------

// Zeroes mass outside the k highest-probability tokens (ties kept at the
// lowest indices) and renormalizes. k > |V| is the identity.
TokenDistribution truncate_top_k(const TokenDistribution& dist, int k);

// Smallest descending-probability prefix whose cumulative mass reaches p
// (the crossing token is included). Returned indices ascending.
std::vector<int> nucleus_set(const TokenDistribution& dist, double p);

// probs proportional to exp(logit / t); t <= 0 is an input error.
TokenDistribution apply_temperature(std::span<const double> logits, double t);

// Tokens ranked by |surprisal - entropy| ascending; shortest such prefix
// with cumulative probability >= tau. Returned indices ascending.
std::vector<int> typical_mass_set(const TokenDistribution& dist, double tau);

// Shared contrastive objective: (1 - weight) * main - weight * penalty.
inline double contrastive_objective(double main, double penalty, double weight) {
    return (1.0 - weight) * main - weight * penalty;
}

// --- decode operations ---------------------------------------------------

GenerationRecord greedy_decode(const LmBackend& backend, std::span<const int> prompt, int max_new_tokens);

// Raw joint log-probability scoring, no length normalization; beams run to
// max_new_tokens unless end-of-text is emitted.
GenerationRecord beam_decode(const LmBackend& backend, std::span<const int> prompt, int beam_width,
                             int max_new_tokens);

// temperature / top_k / top_p / typical.
GenerationRecord sample_decode(const LmBackend& backend, std::span<const int> prompt, const DecodingConfig& config,
                               uint64_t seed, int max_new_tokens);

GenerationRecord contrastive_search_decode(const LmBackend& backend, std::span<const int> prompt, double alpha, int k,
                                           int max_new_tokens);

GenerationRecord adaptive_contrastive_search_decode(const LmBackend& backend, std::span<const int> prompt,
                                                    int max_new_tokens, int candidate_k = kAcsDefaultCandidates);

GenerationRecord fsd_decode(const LmBackend& backend, std::span<const int> prompt, int k, double beta,
                            int max_new_tokens);

GenerationRecord contrastive_decode(const LmBackend& expert, const LmBackend& amateur, std::span<const int> prompt,
                                    int k, int max_new_tokens);

// Dispatch on config.strategy; `amateur` is required for contrastive
// decoding and ignored otherwise.
GenerationRecord run_decoding(const LmBackend& backend, std::span<const int> prompt, const DecodingConfig& config,
                              uint64_t seed, int max_new_tokens, const LmBackend* amateur = nullptr);

// --- serialization -------------------------------------------------------

// Vocabulary-independent form of a record, used for JSONL files and for
// evaluation against a different backend's vocabulary.
struct GenerationText {
    std::vector<std::string> prompt;
    std::vector<std::string> continuation;
    std::vector<double> step_logprobs;
    std::vector<double> alpha_trace;
    std::string strategy_key;
    uint64_t seed = 0;
    std::string backend_name;
    std::string dataset_id;
    std::string prompt_id;
};

GenerationText to_text(const GenerationRecord& record, const Vocabulary& vocab);
std::string generation_to_jsonl(const GenerationText& text);
GenerationText generation_from_jsonl(const std::string& line);

}  // namespace decbench
