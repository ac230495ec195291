#pragma once

#include <span>
#include <string>
#include <vector>

#include "decbench/backend.hpp"

namespace decbench {

// Continuations shorter than this cannot form the n-gram ratios; they score
// a flagged 0 instead of erroring so sweeps never abort.
inline constexpr int kDiversityMinTokens = 5;

struct DiversityResult {
    double value = 0;
    bool degenerate = false;
};

// Product over n in {2,3,4} of unique/total n-gram ratios of the
// continuation, computed over tokens as generated.
DiversityResult diversity(std::span<const std::string> continuation);

// Mean log-likelihood (nats) of `continuation` after `prefix` under the
// evaluator. Tokens are re-encoded into the evaluator's vocabulary
// (unknowns map to its reserved index). Returns -inf when any step has zero
// probability; callers mark such records degenerate.
double coherence_raw(const LmBackend& evaluator, std::span<const std::string> prefix,
                     std::span<const std::string> continuation);

// Min/max constants for the smoothed normalization, collected over all
// coherence values of one scope (a sweep run). Non-finite values are
// skipped and counted; they normalize to 0 by convention.
class NormalizationPool {
  public:
    void add(double value);
    void finalize(std::string scope_id);

    bool finalized() const { return finalized_; }
    double min() const { return min_; }
    double max() const { return max_; }
    size_t size() const { return values_.size(); }
    size_t skipped() const { return skipped_; }
    const std::string& scope_id() const { return scope_id_; }

    // (value - min + 1) / (max - min + 1), in (0, 1]. Throws RangeError for
    // values outside [min, max] or before finalization.
    double normalize(double value) const;

  private:
    std::vector<double> values_;
    size_t skipped_ = 0;
    double min_ = 0;
    double max_ = 0;
    bool finalized_ = false;
    std::string scope_id_;
};

// Harmonic mean of three unit-scale components; 0 if any component is 0.
// Inputs outside [0, 1] are an input error (normalize first).
double qtext(double div, double mauve, double coh);

// One experiment cell's metric values, all stored on [0, 1] except the raw
// coherence (report emitters rescale for display).
struct MetricReport {
    std::string experiment_key;
    double div = 0;
    double coherence_raw = 0;
    double coh = 0;
    double mauve = 0;
    double qtext = 0;
    long n_generations = 0;
};

inline constexpr const char* kMetricCsvHeader = "experiment_key,div,coherence_raw,coh,mauve,qtext,n_generations";

std::string metric_report_csv_row(const MetricReport& report);
std::string metric_report_jsonl(const MetricReport& report);

}  // namespace decbench
