#include "decbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include <json.hpp>

#include "decbench/errors.hpp"
#include "decbench/strconv.hpp"

namespace decbench {

DiversityResult diversity(std::span<const std::string> continuation) {
    if (continuation.size() < static_cast<size_t>(kDiversityMinTokens)) {
        return DiversityResult{0.0, true};
    }
    double value = 1.0;
    for (size_t n = 2; n <= 4; ++n) {
        size_t total = continuation.size() - n + 1;
        std::unordered_set<std::string> unique;
        unique.reserve(total);
        for (size_t i = 0; i < total; ++i) {
            std::string gram;
            for (size_t j = 0; j < n; ++j) {
                gram += continuation[i + j];
                gram += '\x1f';  // unit separator keeps ("ab","c") != ("a","bc")
            }
            unique.insert(std::move(gram));
        }
        value *= static_cast<double>(unique.size()) / static_cast<double>(total);
    }
    return DiversityResult{value, false};
}

double coherence_raw(const LmBackend& evaluator, std::span<const std::string> prefix,
                     std::span<const std::string> continuation) {
    if (continuation.empty()) {
        throw InputError("coherence needs a non-empty continuation");
    }
    std::vector<std::string> prefix_vec(prefix.begin(), prefix.end());
    std::vector<std::string> cont_vec(continuation.begin(), continuation.end());
    std::vector<int> prefix_ids = evaluator.vocab().encode(prefix_vec);
    std::vector<int> cont_ids = evaluator.vocab().encode(cont_vec);
    double total = sequence_logprob(evaluator, prefix_ids, cont_ids);
    return total / static_cast<double>(continuation.size());
}

void NormalizationPool::add(double value) {
    if (finalized_) {
        throw RangeError("normalization pool already finalized");
    }
    if (!std::isfinite(value)) {
        ++skipped_;
        return;
    }
    values_.push_back(value);
}

void NormalizationPool::finalize(std::string scope_id) {
    if (values_.empty()) {
        throw RangeError("normalization pool is empty");
    }
    min_ = values_.front();
    max_ = values_.front();
    for (double v : values_) {
        min_ = std::min(min_, v);
        max_ = std::max(max_, v);
    }
    scope_id_ = std::move(scope_id);
    finalized_ = true;
}

double NormalizationPool::normalize(double value) const {
    if (!finalized_) {
        throw RangeError("normalization pool not finalized");
    }
    if (!(value >= min_ && value <= max_)) {
        throw RangeError("coherence " + format_double(value) + " outside pool range [" + format_double(min_) + ", " +
                         format_double(max_) + "] of scope '" + scope_id_ + "'");
    }
    return (value - min_ + 1.0) / (max_ - min_ + 1.0);
}

double qtext(double div, double mauve, double coh) {
    auto check = [](double v, const char* name) {
        if (!(v >= 0 && v <= 1)) {
            throw InputError(std::string(name) + " must be in [0, 1], got " + format_double(v));
        }
    };
    check(div, "div");
    check(mauve, "mauve");
    check(coh, "coh");
    if (div == 0 || mauve == 0 || coh == 0) {
        return 0;  // limit convention
    }
    // Summing the reciprocals in sorted order makes the result exactly
    // permutation-invariant.
    double r[3] = {1.0 / div, 1.0 / mauve, 1.0 / coh};
    std::sort(r, r + 3);
    return 3.0 / (r[0] + r[1] + r[2]);
}

std::string metric_report_csv_row(const MetricReport& r) {
    std::string out = r.experiment_key;
    out += ',';
    out += format_double(r.div);
    out += ',';
    out += format_double(r.coherence_raw);
    out += ',';
    out += format_double(r.coh);
    out += ',';
    out += format_double(r.mauve);
    out += ',';
    out += format_double(r.qtext);
    out += ',';
    out += std::to_string(r.n_generations);
    return out;
}

std::string metric_report_jsonl(const MetricReport& r) {
    nlohmann::ordered_json j;
    j["experiment_key"] = r.experiment_key;
    j["div"] = r.div;
    j["coherence_raw"] = std::isfinite(r.coherence_raw) ? nlohmann::ordered_json(r.coherence_raw)
                                                        : nlohmann::ordered_json(format_double(r.coherence_raw));
    j["coh"] = r.coh;
    j["mauve"] = r.mauve;
    j["qtext"] = r.qtext;
    j["n_generations"] = r.n_generations;
    return j.dump();
}

}  // namespace decbench
