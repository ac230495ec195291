#pragma once

#include <span>
#include <vector>

namespace decbench {

// Probability vector over a finite vocabulary at one decoding step.
// `logits` is optional (empty when the producer only knows probabilities);
// when present, probs are the normalized exponentials of the logits.
struct TokenDistribution {
    std::vector<double> probs;
    std::vector<double> logits;

    int size() const { return static_cast<int>(probs.size()); }
    bool has_logits() const { return !logits.empty(); }

    // Non-negative entries summing to 1 within `tol`; throws InputError.
    void validate(double tol = 1e-9) const;

    static TokenDistribution from_probs(std::vector<double> probs);
    // Numerically stable softmax; keeps the logits.
    static TokenDistribution from_logits(std::vector<double> logits);

    // log(probs[id]); -inf for zero mass. Falls back on stored logits only
    // through the probabilities, so replay checks see one consistent value.
    double logprob(int id) const;
};

// Shannon entropy in nats, with 0 * log 0 = 0.
double entropy(std::span<const double> probs);
double entropy(const TokenDistribution& dist);

// Index of the maximum, ties broken by lowest index.
int argmax_lowest_index(std::span<const double> values);

}  // namespace decbench
