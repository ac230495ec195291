#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "decbench/backend.hpp"

namespace decbench {

inline constexpr int kMauveDefaultBins = 16;
inline constexpr double kMauveDefaultScalingC = 5.0;
inline constexpr int kFrontierGridPoints = 101;
// Quantization must not depend on input order or on who is "gen" and who is
// "ref"; k-means runs on the canonically sorted union with this fixed seed.
inline constexpr uint64_t kMauveKmeansSeed = 1000003;

using Embedding = std::vector<double>;

// Mean-pooled hashed token representations; the default text embedder.
// Tokens are re-encoded into the embedder's vocabulary. Throws EvalError on
// empty token lists and CapabilityError when the backend lacks
// representations.
Embedding embed_tokens(const LmBackend& embedder, std::span<const std::string> tokens);

// Histograms of both sets over shared k-means bins (k-means++-style
// deterministic seeding, Lloyd iterations with lowest-index tie-breaks).
struct QuantizedPair {
    std::vector<double> p;  // gen
    std::vector<double> q;  // ref
};
QuantizedPair quantize_embeddings(std::span<const Embedding> gen, std::span<const Embedding> ref, int num_bins,
                                  uint64_t seed = kMauveKmeansSeed);

// True when no bin carries mass from both sets.
bool disjoint_support(const QuantizedPair& pair);

// Area dominated by the divergence frontier over mixtures
// R_lambda = lambda*P + (1-lambda)*Q, with points
// (exp(-c*KL(Q||R)), exp(-c*KL(P||R))) on a symmetric lambda grid.
// In [0, 1]; 1 means indistinguishable. Symmetric in (p, q).
double frontier_area(std::span<const double> p, std::span<const double> q, double scaling_c,
                     int grid_points = kFrontierGridPoints);

// The full pipeline on embeddings.
double mauve_lite(std::span<const Embedding> gen, std::span<const Embedding> ref, int num_bins = kMauveDefaultBins,
                  double scaling_c = kMauveDefaultScalingC);

// Convenience entry point on token sequences.
double mauve_lite_texts(const LmBackend& embedder, std::span<const std::vector<std::string>> gen_texts,
                        std::span<const std::vector<std::string>> ref_texts, int num_bins = kMauveDefaultBins,
                        double scaling_c = kMauveDefaultScalingC);

}  // namespace decbench
